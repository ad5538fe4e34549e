/* Hidden-layer forward pass shaped like the Rodinia/HeCBench backprop
 * benchmark: a reduction kernel leaves per-block partial sums on the
 * device, the host folds them into each hidden unit's activation, and a
 * second kernel consumes the activations. */
#define HID 16
#define NUM_BLOCKS 4096

float partial_sum[NUM_BLOCKS * HID];
float conn[NUM_BLOCKS * HID];
float input_units[NUM_BLOCKS];
float hidden_units[HID + 1];
float input_weights[1][HID + 1];
float out[HID + 1];

double exp(double x);

int main(void) {
    int hid = HID;
    int num_blocks = NUM_BLOCKS;
    float sum;

    for (int i = 0; i < num_blocks; ++i) {
        input_units[i] = 1.0f / (float)(i + 1);
    }
    for (int i = 0; i < num_blocks * hid; ++i) {
        conn[i] = 0.001f * (float)i;
    }
    for (int j = 0; j <= hid; ++j) {
        input_weights[0][j] = 0.1f * (float)j;
    }

    #pragma omp target data map(to: conn, input_units) map(from: out) map(alloc: hidden_units, partial_sum)
    {
        #pragma omp target teams distribute parallel for firstprivate(hid, num_blocks)
        for (int k = 0; k < num_blocks * hid; ++k) {
            partial_sum[k] = conn[k] * input_units[k / hid];
        }

        /* partial_sum: valid on device, invalid on host */
        #pragma omp target update from(partial_sum)
        for (int j = 1; j <= hid; j++) {
            sum = 0.0;
            for (int k = 0; k < num_blocks; k++) {
                sum += partial_sum[k * hid + j-1];
            }
            sum += input_weights[0][j];
            hidden_units[j] = 1.0 / (1.0 + exp(-sum));
        }

        #pragma omp target update to(hidden_units)
        #pragma omp target teams distribute parallel for firstprivate(hid)
        for (int m = 1; m <= hid; ++m) {
            out[m] = hidden_units[m] * 0.5f;
        }
    }

    float acc = 0.0f;
    for (int m = 1; m <= hid; ++m) {
        acc += out[m];
    }
    return (int)acc;
}
