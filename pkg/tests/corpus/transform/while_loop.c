/* Drain loop: the while condition re-reads a counter array the kernel
 * decrements, so the host copy must be refreshed on every trip. */
#define N 512

int work[N];

int main(void) {
    for (int i = 0; i < N; ++i) {
        work[i] = 3;
    }
    while (work[0] > 0) {
        #pragma omp target teams distribute parallel for
        for (int i = 0; i < N; ++i) {
            work[i] = work[i] - 1;
        }
    }
    return work[1];
}
