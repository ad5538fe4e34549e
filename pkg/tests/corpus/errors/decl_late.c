/* The second kernel's buffer is declared between the kernels, after the
 * spot where the data region has to open; the tool cannot brace a region
 * over a name that does not exist yet. */
#define N 100

int main(void) {
    double b[N];
    for (int i = 0; i < N; ++i) {
        b[i] = (double)i;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        b[i] = b[i] * 2.0;
    }
    double a[N];
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        a[i] = b[i] + 1.0;
    }
    return (int)(a[0] + b[0]);
}
