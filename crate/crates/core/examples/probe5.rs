use ersatz_info::experiments::increment_pdf;
use ersatz_info::trajectory::NoiseSpec;

fn main() {
    let taus: Vec<u64> = (0..=6).map(|p| 1u64 << p).collect();
    for (name, spec) in [
        ("fgn", NoiseSpec::fgn(0.7, 1 << 16, 30_000)),
        ("h1", NoiseSpec::lognormal(false, 0.7, 1 << 16, 30_000)),
        ("h2", NoiseSpec::lognormal(true, 0.7, 1 << 16, 30_000)),
        ("mrw", NoiseSpec::mrw(0.7, 0.025, 1 << 16, 30_000)),
    ] {
        let pdf = increment_pdf(&spec, &taus, 20).unwrap();
        let max_pair = pdf
            .ks_pairs
            .iter()
            .cloned()
            .fold(
                (0, 0, 0.0f64, 0.0),
                |acc, p| {
                    if p.2 > acc.2 {
                        p
                    } else {
                        acc
                    }
                },
            );
        let crit = pdf.ks_pairs[0].3;
        let d_1_64 = pdf
            .ks_pairs
            .iter()
            .find(|p| p.0 == 1 && p.1 == 64)
            .unwrap()
            .2;
        println!(
            "{name}: max KS {:.4} at ({},{}), KS(1,64) {:.4}, crit {:.4}, ratio {:.1}; flatness: {:?}",
            max_pair.2, max_pair.0, max_pair.1, d_1_64, crit, max_pair.2 / crit,
            pdf.rows.iter().map(|r| (r.flatness * 100.0).round() / 100.0).collect::<Vec<_>>()
        );
    }
}
