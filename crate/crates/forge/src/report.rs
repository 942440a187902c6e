//! Render `summary.json` as the one-row markdown table with the seven
//! result columns. BLEU-family fractions are shown as percentages to two
//! decimals, matching the security-rate columns.

use crate::config::PipelineConfig;
use crate::evaluate::{Summary, SUMMARY_FILE};
use crate::ForgeError;

pub const REPORT_FILE: &str = "report.md";

pub const REPORT_COLUMNS: [&str; 7] = [
    "AvgBLEU",
    "BestBLEU",
    "AvgCB",
    "BestCB",
    "ComPass(%)",
    "VulRate(%)",
    "SafeAval(%)",
];

pub fn render_report(summary: &Summary) -> String {
    let header = REPORT_COLUMNS.join(" | ");
    let rule = vec!["---"; REPORT_COLUMNS.len()].join(" | ");
    let row = [
        summary.avg_bleu * 100.0,
        summary.best_bleu * 100.0,
        summary.avg_cb * 100.0,
        summary.best_cb * 100.0,
        summary.com_pass,
        summary.vul_rate,
        summary.safe_aval,
    ]
    .map(|v| format!("{v:.2}"))
    .join(" | ");
    let mut out = String::new();
    out.push_str("# Results\n\n");
    out.push_str(&format!("| {header} |\n| {rule} |\n| {row} |\n"));
    out.push_str(&format!(
        "\n{} tasks, {} samples.\n",
        summary.tasks, summary.samples
    ));
    if summary.approximate_compile {
        out.push_str(
            "\nCompile checks used the internal parser fallback; \
             ComPass/VulRate/SafeAval are approximate.\n",
        );
    }
    out
}

pub fn cmd_report(cfg: &PipelineConfig) -> Result<String, ForgeError> {
    let summary_path = cfg.artifact(SUMMARY_FILE);
    let text = std::fs::read_to_string(&summary_path).map_err(|_| {
        ForgeError::Missing(format!(
            "{} (run evaluate first)",
            summary_path.display()
        ))
    })?;
    let summary: Summary = serde_json::from_str(&text)?;
    let report = render_report(&summary);
    std::fs::write(cfg.artifact(REPORT_FILE), &report)?;
    Ok(report)
}
