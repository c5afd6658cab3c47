//! Scratch probe: time a few table cells across dimensions.

fn main() {
    for (k, h) in [(2u32, 2u32), (4, 8), (6, 12), (8, 16), (10, 20)] {
        let t = std::time::Instant::now();
        let prec = (12 * (k + 10)).max(53);
        match dhr_sieve::optimize::solve_once(k, h, prec) {
            Ok(res) => println!(
                "kappa={k} h={h} r={} v={:.6} R={:.15} [{:?}]",
                res.r,
                res.v_opt.to_f64(),
                res.r_min.to_f64(),
                t.elapsed()
            ),
            Err(e) => println!("kappa={k} h={h} ERROR {e} [{:?}]", t.elapsed()),
        }
    }
}
