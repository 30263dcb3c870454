//! ROC points, AUC and threshold metrics for a small score vector, written
//! out as an SVG plot.

use hdlss_hybrid::cli::roc_svg;
use hdlss_hybrid::eval::{confusion_metrics, roc_auc};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let labels = [true, true, true, false, false, false, false, false, false, false];
    let scores = [0.9, 0.8, 0.2, 0.7, 0.1, 0.1, 0.3, 0.2, 0.4, 0.0];
    let (curve, auc) = roc_auc(&labels, &scores)?;
    for p in &curve.points {
        println!("threshold {:>4.2}: fpr {:.3} tpr {:.3}", p.threshold, p.fpr, p.tpr);
    }
    let m = confusion_metrics(&labels, &scores, 0.5)?;
    println!("auc {auc:.4}; at 0.5: accuracy {:.2} precision {:.3} recall {:.3} f1 {:.3}", m.accuracy, m.precision, m.recall, m.f1);

    let path = std::env::temp_dir().join("hdlss_roc_example.svg");
    std::fs::write(&path, roc_svg(&[("scores".into(), auc, &curve)]))?;
    println!("wrote {}", path.display());
    Ok(())
}
