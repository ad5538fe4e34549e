/* Working version of the per-round sum: the inner mapping is gone and
 * an update directive after the kernel forces the copy that the
 * reference count was swallowing.  One copy in, one copy back per
 * round, nothing at region exit. */
#define N 100
#define M 10

int main(void) {
    int a[N] = {}, sum = 0;
    #pragma omp target data map(to: a)
    for (int i = 0; i < M; ++i) {

        #pragma omp target
        for (int j = 0; j < N; ++j) {
            a[j] += j;
        }
        #pragma omp target update from(a)

        for (int j = 0; j < N; ++j) {
            sum += a[j];
        }
    }
    return sum;
}
