use echo_thermo::dynamics::FullDiag;
use echo_thermo::lattice::{Lattice, TfimParams};
use echo_thermo::grid::{TimeGrid, TimeSeries};
use echo_thermo::shots::{noisify, ShotModel};
use echo_thermo::spin::SpinConfig;
use echo_thermo::wick::{nnls_density, select_quantile, quantile_truncate, weight_from_density, FrequencyGrid};
use echo_thermo::beta_critical;
use num_complex::Complex;
use std::time::Instant;

fn damp(series: &TimeSeries<f64>, sigma: f64) -> TimeSeries<f64> {
    let zeros = series.re_var().iter().all(|&v| v == 0.0);
    let factors: Vec<f64> = series.grid().times().map(|t| (-sigma * sigma * t * t / 2.0).exp()).collect();
    let values: Vec<Complex<f64>> = series.values().iter().zip(&factors).map(|(g, d)| g * d).collect();
    if zeros {
        TimeSeries::exact(*series.grid(), values).unwrap()
    } else {
        let re_var: Vec<f64> = series.re_var().iter().zip(&factors).map(|(v, d)| v * d * d).collect();
        let im_var: Vec<f64> = series.im_var().iter().zip(&factors).map(|(v, d)| v * d * d).collect();
        TimeSeries::with_noise(*series.grid(), values, re_var, im_var, 10_000).unwrap()
    }
}

fn main() {
    let lat = Lattice::honeycomb10();
    let params = TfimParams::with_field(1.0f64);
    let fd = FullDiag::new(&lat, &params).unwrap();
    let beta_c: f64 = beta_critical();
    let dt = std::f64::consts::PI / 16.0;
    let n_t = 64usize;
    let grid = TimeGrid::new(dt, n_t).unwrap();
    let nw = 2 * n_t;
    let fgrid = FrequencyGrid::nyquist_window(dt, nw).unwrap();
    let sigma = 2.0 * fgrid.spacing();

    for noisy in [false, true] {
        let t0 = Instant::now();
        print!("{}:", if noisy { "noisy 1e4" } else { "exact" });
        // densities are beta-independent: one per state
        let mut densities = Vec::with_capacity(1024);
        for bits in 0..1024u64 {
            let psi = SpinConfig::new(bits, 10).unwrap();
            let series = fd.echoes(&psi, &grid);
            let series = if noisy {
                noisify(&series, &ShotModel::gaussian(10_000, 0x5eed ^ bits)).unwrap()
            } else { series };
            let damped = damp(&series, sigma);
            let density = nnls_density(&damped, &fgrid).unwrap();
            let density = if noisy {
                let sel = select_quantile(&density, &damped, 5.0 * n_t as f64).unwrap();
                quantile_truncate(&density, sel.q).unwrap()
            } else { density };
            densities.push(density);
        }
        println!(" ({:?} for 1024 densities)", t0.elapsed());
        for beta_mult in [1.0f64/3.0, 2.0/3.0, 1.0, 4.0/3.0, 2.0, 8.0/3.0] {
            let beta = beta_mult * beta_c;
            let scale = (beta * beta * sigma * sigma / 2.0).exp();
            let w_exact = fd.boltzmann_table(beta);
            let w_pipe: Vec<f64> = densities.iter().map(|d| weight_from_density(d, beta, 0.0) / scale).collect();
            let zp: f64 = w_pipe.iter().sum();
            let ze: f64 = w_exact.iter().sum();
            let mut m2p = 0.0; let mut m2e = 0.0; let mut kl = 0.0; let mut worst: f64 = 0.0;
            for bits in 0..1024usize {
                let m2: f64 = SpinConfig::new(bits as u64, 10).unwrap().magnetization_sq();
                let pp = w_pipe[bits] / zp;
                let pe = w_exact[bits] / ze;
                m2p += pp * m2; m2e += pe * m2;
                if pp > 0.0 { kl += pp * (pp / pe).ln(); }
                worst = worst.max((w_pipe[bits] - w_exact[bits]).abs() / w_exact[bits]);
            }
            println!("   b={:.3}: m2 bias={:+.3e} kl={:.3e} worst-w={:.2e}", beta, (m2p - m2e) / m2e, kl, worst);
        }
    }
    // classical separation at beta_c
    let m2_cl = echo_thermo::dynamics::classical_thermal_m2(&lat, 1.0, beta_c);
    let m2_q = fd.thermal_m2(beta_c);
    println!("at beta_c: quantum m2 = {:.4}, classical m2 = {:.4}", m2_q, m2_cl);
}
