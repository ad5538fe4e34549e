#define N 64

int main(void) {
    int a[N];
    for (int i = 0; i < N; i++) {
        a[i] = i;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; i++) {
        a[i] = i * 2;
    }
    for (int i = 0; i < N; i++) {
        a[i] = i * 3;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; i++) {
        a[i] = i * 4;
    }
    return a[5];
}
