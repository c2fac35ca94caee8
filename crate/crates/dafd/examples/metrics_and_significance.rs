//! Detection metrics and the pooled-variance t-test used by the report's
//! significance markers.
//!
//! ```bash
//! cargo run -p dafd --example metrics_and_significance
//! ```

use dafd::eval::{confusion, metrics, ttest, MetricName};
use dafd::ingest::Class;

fn main() -> dafd::Result<()> {
    let labels = [
        Class::Fall, Class::Fall, Class::Fall, Class::Fall, Class::Adl,
        Class::Adl, Class::Adl, Class::Adl, Class::Adl, Class::Adl,
    ];
    let predictions = [
        Class::Fall, Class::Fall, Class::Fall, Class::Adl, Class::Adl,
        Class::Adl, Class::Adl, Class::Adl, Class::Fall, Class::Adl,
    ];
    let counts = confusion(&predictions, &labels)?;
    println!(
        "tp={} tn={} fp={} fn={}",
        counts.true_pos, counts.true_neg, counts.false_pos, counts.false_neg
    );
    let m = metrics(&counts);
    for name in MetricName::ALL {
        let metric = m.get(name);
        println!(
            "{:<3} = {:.4}{}",
            name.label(),
            metric.value,
            if metric.degenerate { " (degenerate)" } else { "" }
        );
    }

    // per-fold F1 scores of two training modes
    let source_only = [0.61, 0.58, 0.66, 0.60, 0.63];
    let dafd = [0.74, 0.71, 0.78, 0.69, 0.75];
    let t = ttest(&dafd, &source_only)?;
    println!(
        "t = {:.3}, p = {:.5} -> {}",
        t.t,
        t.p,
        if t.significant { "significant at 95%" } else { "not significant" }
    );
    Ok(())
}
