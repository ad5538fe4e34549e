#define N 128
#define T 8

int main(void) {
    int a[N];
    int b[N] = {};
    for (int t = 0; t < T; ++t) {
        #pragma omp target
        for (int i = 0; i < N; ++i) {
            a[i] = b[i] * 2;
        }
        for (int i = 0; i < N; ++i) {
            b[i] = a[i] + 1;
        }
    }
    return b[0];
}
