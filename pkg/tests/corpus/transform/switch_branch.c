#define N 128

int main(int argc, char **argv) {
    double a[N];
    for (int i = 0; i < N; ++i) {
        a[i] = i;
    }
    switch (argc) {
    case 1:
        #pragma omp target teams distribute parallel for
        for (int i = 0; i < N; ++i) {
            a[i] = a[i] * 2.0;
        }
        break;
    case 2:
        for (int i = 0; i < N; ++i) {
            a[i] = a[i] + 1.0;
        }
        break;
    default:
        break;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        a[i] = a[i] - 0.5;
    }
    return (int) a[0];
}
