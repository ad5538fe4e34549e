#define N 512

int main(void) {
    double x[N];
    double y[N];
    double alpha = 2.5;
    int n = N;
    for (int i = 0; i < n; ++i) {
        x[i] = 1.0 / (i + 1);
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < n; ++i) {
        y[i] = alpha * x[i] + 1.0;
    }
    return (int) y[n - 1];
}
