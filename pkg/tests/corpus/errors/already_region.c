/* Already hand-annotated: the data region must make the tool bail out
 * instead of layering a second mapping scheme on top. */
#define N 64

double v[N];

int main(void) {
    for (int i = 0; i < N; ++i) {
        v[i] = 1.0;
    }
    #pragma omp target data map(tofrom: v)
    {
        #pragma omp target teams distribute parallel for
        for (int i = 0; i < N; ++i) {
            v[i] = v[i] * 2.0;
        }
    }
    return (int)v[0];
}
