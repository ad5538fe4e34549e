#define N 96

void checkpoint(double *v, int n);

int main(void) {
    double data[N];
    for (int i = 0; i < N; ++i) {
        data[i] = i * 0.25;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        data[i] = data[i] + 1.0;
    }
    checkpoint(data, N);
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        data[i] = data[i] * 0.5;
    }
    return (int) data[N - 1];
}
