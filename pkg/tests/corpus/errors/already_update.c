/* A stray update directive counts as manual data management too. */
#define N 64

double v[N];

int main(void) {
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < N; ++i) {
        v[i] = (double)i;
    }
    #pragma omp target update from(v)
    return (int)v[0];
}
