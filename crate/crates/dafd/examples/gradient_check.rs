//! Verify the hand-written backward pass against central finite differences
//! for each grid value of the domain regularization parameter.
//!
//! ```bash
//! cargo run -p dafd --example gradient_check
//! ```

use dafd::dann::GRID_LAMBDA;
use dafd::nn::{grad_check, ModelParams, Tensor, INPUT_CHANNELS, INPUT_LEN};
use dafd::rng::stream;
use rand::Rng;

fn main() -> dafd::Result<()> {
    let params = ModelParams::init(1);
    let mut rng = stream(1, 2);
    let mut batch = Tensor::zeros(&[4, INPUT_CHANNELS, INPUT_LEN]);
    for v in batch.data_mut() {
        *v = rng.gen_range(0.0..1.0);
    }
    for lambda in GRID_LAMBDA {
        let report = grad_check(&params, &batch, lambda, 1e-5)?;
        println!(
            "lambda {lambda:<4}: max relative error {:.3e} over {} parameters ({} kink-adjacent skipped), worst at {}",
            report.max_rel_err, report.checked, report.skipped, report.worst_param
        );
    }
    Ok(())
}
