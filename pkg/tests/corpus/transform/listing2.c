#define N 100

int main(void) {
    int a[N] = {};
    #pragma omp target
    for (int i = 0; i < N; ++i) {
        a[i] += i;
    }

    #pragma omp target
    for (int i = 0; i < N; ++i) {
        a[i] *= i;
    }
    return a[0];
}
