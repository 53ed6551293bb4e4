//! Report serialization: table CSV, JSON, a plot-ready CSV and a small SVG
//! line chart.

use std::fmt::Write as _;
use std::io;

use super::{BenchmarkRecord, ScalingKind, ScalingReport};

pub const CSV_HEADER: &str =
    "data_size,workers,t_sequential_s,t_parallel_s,speedup,efficiency,mae_sequential,mae_parallel,repeats";
pub const ORDER_CSV_HEADER: &str =
    "order,data_size,workers,t_sequential_s,t_parallel_s,speedup,efficiency,mae_sequential,mae_parallel,repeats";

fn row(r: &BenchmarkRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.data_size, r.workers, r.t_sequential, r.t_parallel, r.speedup, r.efficiency, r.mae_sequential, r.mae_parallel, r.repeats
    )
}

fn x_label(kind: ScalingKind) -> &'static str {
    match kind {
        ScalingKind::SizeSweep => "data_size",
        ScalingKind::Strong | ScalingKind::Weak => "workers",
        ScalingKind::OrderSweep => "order",
    }
}

fn x_value(kind: ScalingKind, r: &BenchmarkRecord) -> String {
    match kind {
        ScalingKind::SizeSweep => r.data_size.to_string(),
        ScalingKind::Strong | ScalingKind::Weak => r.workers.to_string(),
        // quoted: the order itself contains commas
        ScalingKind::OrderSweep => format!("\"{}\"", r.order.map(|o| o.to_string()).unwrap_or_default()),
    }
}

impl ScalingReport {
    /// Table CSV. Order sweeps get a leading quoted `order` column.
    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        let ordered = self.kind == ScalingKind::OrderSweep;
        writeln!(w, "{}", if ordered { ORDER_CSV_HEADER } else { CSV_HEADER })?;
        for r in &self.records {
            if ordered {
                write!(w, "{},", x_value(self.kind, r))?;
            }
            writeln!(w, "{}", row(r))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// `x,speedup,efficiency`, where `x` is the size, the worker count or
    /// the order depending on the experiment.
    pub fn write_plot_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{},speedup,efficiency", x_label(self.kind))?;
        for r in &self.records {
            writeln!(w, "{},{},{}", x_value(self.kind, r), r.speedup, r.efficiency)?;
        }
        Ok(())
    }

    /// Speedup and efficiency against the row index, labelled with the
    /// experiment's x values.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 50.0;
        let n = self.records.len();
        let y_max = self
            .records
            .iter()
            .flat_map(|r| [r.speedup, r.efficiency])
            .fold(1.0_f64, f64::max)
            * 1.1;
        let px = |i: usize| PAD + if n > 1 { i as f64 * (W - 2.0 * PAD) / (n - 1) as f64 } else { (W - 2.0 * PAD) / 2.0 };
        let py = |v: f64| H - PAD - v / y_max * (H - 2.0 * PAD);
        let polyline = |f: fn(&BenchmarkRecord) -> f64| {
            self.records
                .iter()
                .enumerate()
                .map(|(i, r)| format!("{:.1},{:.1}", px(i), py(f(r))))
                .collect::<Vec<_>>()
                .join(" ")
        };

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<line x1="{PAD}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{y0}" stroke="black"/>"#,
            y0 = H - PAD,
            x1 = W - PAD
        );
        for k in 0..=4 {
            let v = y_max * k as f64 / 4.0;
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"#, PAD - 6.0, py(v) + 4.0);
        }
        for (i, r) in self.records.iter().enumerate() {
            let label = x_value(self.kind, r).replace('"', "");
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#, px(i), H - PAD + 16.0);
        }
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, W / 2.0, H - 10.0, x_label(self.kind));
        let _ = writeln!(s, r##"<polyline fill="none" stroke="#1f77b4" stroke-width="2" points="{}"/>"##, polyline(|r| r.speedup));
        let _ = writeln!(s, r##"<polyline fill="none" stroke="#d62728" stroke-width="2" stroke-dasharray="6 3" points="{}"/>"##, polyline(|r| r.efficiency));
        let _ = writeln!(s, r##"<text x="{:.1}" y="20" fill="#1f77b4">speedup</text>"##, PAD);
        let _ = writeln!(s, r##"<text x="{:.1}" y="20" fill="#d62728">efficiency</text>"##, PAD + 70.0);
        s.push_str("</svg>\n");
        s
    }
}
