//! Gnuplot script generation for sweep data files. The script is emitted as
//! text only; the harness never executes it.

use crate::config::{Result, SimError};
use std::path::Path;

/// Generate a log-y BER-over-dB plot script for `data_path`. Column labels
/// are taken from the file's `# columns:` header.
pub fn emit_plot_script(data_path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(data_path)?;
    let columns = text
        .lines()
        .find_map(|l| l.strip_prefix("# columns:"))
        .ok_or_else(|| {
            SimError::Config(format!(
                "{}: missing '# columns:' header",
                data_path.display()
            ))
        })?;
    let names: Vec<&str> = columns.split_whitespace().collect();
    if names.len() < 2 {
        return Err(SimError::Config(format!(
            "{}: need at least one receiver column",
            data_path.display()
        )));
    }
    let file = data_path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| data_path.display().to_string());

    let mut script = String::new();
    script.push_str("set datafile missing \"NaN\"\n");
    script.push_str("set logscale y\n");
    script.push_str("set grid\n");
    script.push_str("set xlabel \"10 log10(Eb/N0) in dB\"\n");
    script.push_str("set ylabel \"BER\"\n");
    script.push_str("set key outside right\n");
    script.push_str("plot \\\n");
    for (i, name) in names.iter().enumerate().skip(1) {
        let sep = if i + 1 < names.len() { ", \\\n" } else { "\n" };
        script.push_str(&format!(
            "  '{file}' using 1:{} with linespoints title '{name}'{sep}",
            i + 1
        ));
    }
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(tag: &str, content: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir()
            .join(format!("mdpam_plot_{}_{tag}.data", std::process::id()));
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn three_column_file_plots_two_curves() {
        let path = write_temp("ok", "# columns: ebn0_db matched bcjr-va\n2 1e-1 2e-1\n4 1e-2 5e-2\n");
        let script = emit_plot_script(&path).unwrap();
        assert_eq!(script.matches("using 1:").count(), 2);
        assert!(script.contains("title 'matched'"));
        assert!(script.contains("title 'bcjr-va'"));
        assert!(script.contains("logscale y"));
        // Deterministic output.
        assert_eq!(script, emit_plot_script(&path).unwrap());
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn missing_file_or_header_is_an_error() {
        assert!(emit_plot_script(Path::new("/nonexistent/x.data")).is_err());
        let path = write_temp("noheader", "2 1e-1\n");
        assert!(emit_plot_script(&path).is_err());
        std::fs::remove_file(path).ok();
    }
}
