// temporary calibration scan; removed once the constant is frozen
use popcode::data::{distinct_rating_split, synthesize_dataset};

fn main() {
    for i in 0..=40 {
        let scale = 0.20 + 0.01 * i as f64;
        let d = synthesize_dataset(10_000, 5, 5, 1, scale).unwrap();
        let (one, two, three) = distinct_rating_split(&d);
        let err = (one - 0.35).abs().max((two - 0.50).abs()).max((three - 0.15).abs());
        println!(
            "scale {scale:.3}: one {:.4} two {:.4} three+ {:.4}  max_err {:.4}",
            one, two, three, err
        );
    }
}
