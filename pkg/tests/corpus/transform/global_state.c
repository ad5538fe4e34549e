#define N 256

double gbuf[N];

void fill_squares(void) {
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        gbuf[i] = (double) i * i;
    }
}

int main(void) {
    fill_squares();
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
        total += gbuf[i];
    }
    return (int) total;
}
