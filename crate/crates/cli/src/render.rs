use serde_json::json;

use crate::commands::Outcome;
use crate::config::Format;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn stamp(out: &Outcome) -> String {
    let seed = out
        .seed
        .map_or_else(|| "none".to_string(), |s| s.to_string());
    format!("kcbs {VERSION} {} seed={seed}", out.command)
}

/// Every format carries the version, the seed and the effective config.
pub fn render(out: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "tool": "kcbs",
                "version": VERSION,
                "command": out.command,
                "seed": out.seed,
                "effective_config": out.config,
                "result": out.result,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => format!("# {} config={}\n{}", stamp(out), out.config, out.csv),
        Format::Text => format!("{}\nconfig: {}\n{}", stamp(out), out.config, out.text),
    }
}
