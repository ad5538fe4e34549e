#define N 128

void bump(double *v, int n) {
    for (int i = 0; i < n; ++i) {
        v[i] += 1.0;
    }
}

int main(void) {
    double data[N];
    for (int i = 0; i < N; ++i) {
        data[i] = i;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        data[i] = data[i] * 2.0;
    }
    bump(data, N);
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        data[i] = data[i] + 0.5;
    }
    return (int) data[0];
}
