#define N 256

int main(void) {
    double x[N];
    double y[N];
    int n = N;
    for (int i = 0; i < n; i++) {
        x[i] = i;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < n; i++) {
        y[i] = x[i] * 3.0;
    }
    return (int) y[0];
}
