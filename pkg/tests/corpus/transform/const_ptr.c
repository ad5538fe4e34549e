#define N 96

double checksum(const double *v, int n);

int main(void) {
    double data[N];
    double s = 0.0;
    for (int i = 0; i < N; ++i) {
        data[i] = i * 0.125;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        data[i] = data[i] + 2.0;
    }
    s = checksum(data, N);
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        data[i] = data[i] * 3.0;
    }
    return (int) (s + data[0]);
}
