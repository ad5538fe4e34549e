#define N 64

int bar(int a[]);

int foo(int a[]) {
    int x = bar(a);
    if (x > 0) {
        a[x] = 0;
    }
    return x;
}

int main(void) {
    int arr[N];
    for (int i = 0; i < N; ++i) {
        arr[i] = i;
    }
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        arr[i] = arr[i] * arr[i];
    }
    int r = foo(arr);
    return r + arr[0];
}
