#define N 1024

int main(void) {
    double a[N];
    double b[N];
    double c[N];
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        a[i] = i * 0.5;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        b[i] = a[i] + 1.0;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        c[i] = b[i] * b[i];
    }
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
        total += c[i];
    }
    return (int) total;
}
