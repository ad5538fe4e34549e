#define N 2048

int main(void) {
    double src[N];
    double tmp[N];
    double dst[N];
    for (int i = 0; i < N; ++i) {
        src[i] = 1.0 * i;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        tmp[i] = src[i] * src[i];
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        dst[i] = tmp[i] + 4.0;
    }
    return (int) dst[7];
}
