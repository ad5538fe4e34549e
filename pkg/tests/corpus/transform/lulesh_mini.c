/* Scaled-down explicit shock hydrodynamics step in the style of the
 * LULESH proxy app.  One structured mesh block, Lagrange leapfrog:
 * nodal force build, acceleration, velocity and position integration,
 * element volume update, then an equation-of-state pass.  The host owns
 * the timestep control: each cycle it reduces the element sound speeds
 * and volumes to a stable dt, which is the only part of the state that
 * has to travel back every iteration.
 *
 * Eighteen mesh fields are mapped; everything else is scalar control.
 */
#define NODES 1024
#define ELEMS 960
#define STEPS 12

double x[NODES];
double y[NODES];
double z[NODES];

double xd[NODES];
double yd[NODES];
double zd[NODES];

double xdd[NODES];
double ydd[NODES];
double zdd[NODES];

double fx[NODES];
double fy[NODES];
double fz[NODES];

double nodal_mass[NODES];
double vmag[NODES];

double e[ELEMS];
double p[ELEMS];
double q[ELEMS];
double ql[ELEMS];
double qq[ELEMS];
double vol[ELEMS];
double delv[ELEMS];
double ss[ELEMS];

double sqrt(double v);
double fabs(double v);

void init_mesh(void);
double courant_dt(double prev_dt);
double energy_checksum(void);
double scan_extent(const double *coord, int n);

int main(void) {
    double dt = 1.0e-3;
    double total = 0.0;
    double extent;
    int cycles = 0;

    /* Elements sit between node pairs, so the mesh only makes sense
     * with at least one more node than elements. */
    if (ELEMS >= NODES) {
        return 1;
    }

    init_mesh();

    for (int step = 0; step < STEPS; ++step) {

        /* ---- nodal force build ------------------------------------ */

        #pragma omp target teams distribute parallel for
        for (int i = 0; i < NODES; ++i) {
            fx[i] = 0.0;
            fy[i] = 0.0;
            fz[i] = 0.0;
        }

        #pragma omp target teams distribute parallel for
        for (int k = 0; k < ELEMS; ++k) {
            double sigma = -p[k] - q[k];
            fx[k] += sigma * 0.33;
            fy[k + 1] += sigma * 0.33;
            fz[k] += sigma * 0.34;
        }

        /* Hourglass damping resists the zero-energy bending modes the
         * one-point quadrature misses; proportional to the velocity
         * difference across each element. */
        #pragma omp target teams distribute parallel for
        for (int k = 0; k < ELEMS; ++k) {
            double hgx = xd[k + 1] - xd[k];
            double hgy = yd[k + 1] - yd[k];
            double hgz = zd[k + 1] - zd[k];
            fx[k] -= hgx * 0.05;
            fy[k] -= hgy * 0.05;
            fz[k] -= hgz * 0.05;
        }

        /* ---- acceleration and boundary pin ------------------------ */

        #pragma omp target teams distribute parallel for
        for (int i = 0; i < NODES; ++i) {
            xdd[i] = fx[i] / nodal_mass[i];
            ydd[i] = fy[i] / nodal_mass[i];
            zdd[i] = fz[i] / nodal_mass[i];
            if (i == 0) {
                xdd[i] = 0.0;
                ydd[i] = 0.0;
                zdd[i] = 0.0;
            }
        }

        /* ---- leapfrog integration --------------------------------- */

        #pragma omp target teams distribute parallel for
        for (int i = 0; i < NODES; ++i) {
            double ux = xd[i] + xdd[i] * dt;
            double uy = yd[i] + ydd[i] * dt;
            double uz = zd[i] + zdd[i] * dt;
            if (ux < 1.0e-12 && ux > -1.0e-12) {
                ux = 0.0;
            }
            xd[i] = ux;
            yd[i] = uy;
            zd[i] = uz;
        }

        #pragma omp target teams distribute parallel for
        for (int i = 0; i < NODES; ++i) {
            x[i] = x[i] + xd[i] * dt;
            y[i] = y[i] + yd[i] * dt;
            z[i] = z[i] + zd[i] * dt;
        }

        /* ---- element volume update -------------------------------- */

        #pragma omp target teams distribute parallel for
        for (int k = 0; k < ELEMS; ++k) {
            double dx = x[k + 1] - x[k];
            double dy = y[k + 1] - y[k];
            double dz = z[k + 1] - z[k];
            double vnew = dx * dy * dz;
            if (vnew < 1.0e-9) {
                vnew = 1.0e-9;
            }
            delv[k] = vnew - vol[k];
            vol[k] = vnew;
        }

        /* ---- artificial viscosity --------------------------------- */

        /* Linear plus quadratic terms, active only in compression
         * (shrinking volume); expansion gets no viscous pressure. */
        #pragma omp target teams distribute parallel for
        for (int k = 0; k < ELEMS; ++k) {
            if (delv[k] < 0.0) {
                double rate = -delv[k] / vol[k];
                ql[k] = rate * 0.06;
                qq[k] = rate * rate * 0.7;
            } else {
                ql[k] = 0.0;
                qq[k] = 0.0;
            }
            q[k] = ql[k] + qq[k];
        }

        /* ---- equation of state ------------------------------------ */

        #pragma omp target teams distribute parallel for
        for (int k = 0; k < ELEMS; ++k) {
            double comp = 1.0 / vol[k] - 1.0;
            double work = delv[k] * (p[k] + q[k]);
            e[k] = e[k] - work * 0.5;
            if (e[k] < 0.0) {
                e[k] = 0.0;
            }
            p[k] = comp * e[k] * 0.6;
            if (p[k] < 0.0) {
                p[k] = 0.0;
            }
            ss[k] = p[k] * 1.2 + 0.01;
        }

        /* ---- host timestep control -------------------------------- */

        dt = courant_dt(dt);
        cycles = cycles + 1;
    }

    /* One extra pass after the time loop: nodal speed magnitudes for
     * the post-run report.  Lives on the device until the very end. */
    #pragma omp target teams distribute parallel for
    for (int i = 0; i < NODES; ++i) {
        double v2 = xd[i] * xd[i] + yd[i] * yd[i] + zd[i] * zd[i];
        vmag[i] = sqrt(v2);
    }

    /* final diagnostics on the host */
    total = energy_checksum();
    extent = scan_extent(x, NODES);
    double peak = 0.0;
    for (int i = 0; i < NODES; ++i) {
        if (vmag[i] > peak) {
            peak = vmag[i];
        }
    }
    total += extent + peak + (double)cycles;
    return (int)total;
}

/* Fill the mesh with a mild initial shock: a pressurized band near the
 * origin, unit masses, everything at rest. */
void init_mesh(void) {
    for (int i = 0; i < NODES; ++i) {
        x[i] = 0.01 * (double)i;
        y[i] = 0.01 * (double)i;
        z[i] = 0.02 * (double)i;
        xd[i] = 0.0;
        yd[i] = 0.0;
        zd[i] = 0.0;
        nodal_mass[i] = 1.0;
    }
    /* small inward kick near the driven end, so the very first cycle
     * already produces compression for the viscosity branch */
    for (int i = 0; i < 8; ++i) {
        xd[i] = -0.01;
    }
    for (int k = 0; k < ELEMS; ++k) {
        vol[k] = 1.0;
        delv[k] = 0.0;
        q[k] = 0.0;
        ql[k] = 0.0;
        qq[k] = 0.0;
        ss[k] = 0.01;
        if (k < 8) {
            e[k] = 3.5;
            p[k] = 1.0;
        } else {
            e[k] = 0.0;
            p[k] = 0.0;
        }
    }
}

/* Total internal plus pressure energy, the quantity the full app checks
 * against the analytic Sedov answer at the end of the run. */
double energy_checksum(void) {
    double internal = 0.0;
    double pressure = 0.0;
    for (int k = 0; k < ELEMS; ++k) {
        internal += e[k] * vol[k];
        pressure += p[k] * vol[k];
    }
    return internal + pressure * 0.4;
}

/* Stable timestep from the usual courant and hydro constraints; reads
 * the element state the EOS kernel just produced. */
double courant_dt(double prev_dt) {
    double courant = 1.0e+20;
    double hydro = 1.0e+20;
    for (int k = 0; k < ELEMS; ++k) {
        double cand = vol[k] / (ss[k] + 1.0e-12);
        if (cand < courant) {
            courant = cand;
        }
        double dv = fabs(delv[k]);
        if (dv > 1.0e-12) {
            double h = vol[k] / dv;
            if (h < hydro) {
                hydro = h;
            }
        }
    }
    double next = courant;
    if (hydro < next) {
        next = hydro;
    }
    next = next * 0.5;
    if (next > prev_dt * 1.1) {
        next = prev_dt * 1.1;
    }
    if (next < 1.0e-7) {
        next = 1.0e-7;
    }
    return next;
}

/* Bounding extent of one coordinate axis; read-only helper the caller
 * uses after the device is done with the mesh. */
double scan_extent(const double *coord, int n) {
    double lo = coord[0];
    double hi = coord[0];
    for (int i = 1; i < n; ++i) {
        if (coord[i] < lo) {
            lo = coord[i];
        }
        if (coord[i] > hi) {
            hi = coord[i];
        }
    }
    return hi - lo;
}
