#define N 100

int main(void) {
    int a[N] = {};
    for (int i = 0; i < N; ++i) {
        #pragma omp target
        for (int j = 0; j < N; ++j) {
            a[j] += j;
        }
    }
    return a[0];
}
