//! Save and reload a model checkpoint bit-exactly: parameters, batch-norm
//! running stats, Adam state, step counters, and hyperparameters.
//!
//! ```bash
//! cargo run -p dafd --example checkpoint_round_trip
//! ```

use dafd::nn::{load_checkpoint, save_checkpoint, Checkpoint, ModelParams, OptimizerState};

fn main() -> dafd::Result<()> {
    let params = ModelParams::init(99);
    let mut opt = OptimizerState::for_model(&params);
    opt.extractor.t = 1234;
    let ckpt = Checkpoint {
        params,
        opt,
        dropout: 0.2,
        lr: 0.0005,
        lambda: 1.3,
    };
    let path = std::env::temp_dir().join("dafd_model.ckpt");
    save_checkpoint(&ckpt, &path)?;
    let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
    println!("checkpoint written: {} ({bytes} bytes)", path.display());

    let loaded = load_checkpoint(&path)?;
    assert_eq!(loaded, ckpt);
    println!(
        "round trip bit-exact; lambda={} lr={} dropout={} extractor step counter={}",
        loaded.lambda, loaded.lr, loaded.dropout, loaded.opt.extractor.t
    );
    Ok(())
}
