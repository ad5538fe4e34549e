/* Per-round device fill folded into a host running sum.  The inner
 * map(from:) looks like it should copy the array back each round, but
 * inside the enclosing data region it only moves the reference count,
 * so the host keeps summing the stale initial zeros. */
#define N 100
#define M 10

int main(void) {
    int a[N] = {}, sum = 0;
    #pragma omp target data map(a)
    for (int i = 0; i < M; ++i) {

        // incorrect mapping
        #pragma omp target map(from:a)
        for (int j = 0; j < N; ++j) {
            a[j] += j;
        }

        for (int j = 0; j < N; ++j) {
            sum += a[j];
        }
    }
    return sum;
}
