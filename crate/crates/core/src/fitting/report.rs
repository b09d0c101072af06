use std::fmt::Write;

use super::FitReport;

/// One row per iteration: `iteration,n_points,n_triangles,eps_hat_max`.
pub fn report_csv(r: &FitReport) -> String {
    let mut s = String::from("iteration,n_points,n_triangles,eps_hat_max\n");
    for rec in &r.records {
        let _ = writeln!(s, "{},{},{},{:e}", rec.iteration, rec.n_points, rec.n_triangles, rec.eps_hat_max);
    }
    s
}

/// Log-scale plot of the sampled maximum error against iteration, with the
/// stopping threshold drawn as a dashed line.
pub fn convergence_svg(r: &FitReport, threshold: f64) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let vals: Vec<f64> = r.records.iter().map(|x| x.eps_hat_max.max(1e-16)).collect();
    let hi = vals.iter().copied().fold(threshold, f64::max).log10().ceil();
    let lo = vals.iter().copied().fold(threshold, f64::min).log10().floor().max(hi - 12.0);
    let lo = if hi - lo < 1.0 { hi - 1.0 } else { lo };
    let n = vals.len().max(2) - 1;
    let px = |i: usize| pad + (w - 2.0 * pad) * i as f64 / n as f64;
    let py = |v: f64| h - pad - (h - 2.0 * pad) * ((v.log10().max(lo) - lo) / (hi - lo));
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    for e in (lo as i32)..=(hi as i32) {
        let y = py(10f64.powi(e));
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">1e{e}</text>"#, pad - 4.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<line x1="{pad}" x2="{}" y1="{y:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
        w - pad,
        y = py(threshold)
    );
    let pts: Vec<String> = vals.iter().enumerate().map(|(i, &v)| format!("{:.2},{:.2}", px(i), py(v))).collect();
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#, pts.join(" "));
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">iteration</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(s, r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">max sampled error</text>"#, h / 2.0, h / 2.0);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::IterRecord;

    fn report() -> FitReport {
        FitReport {
            records: (0..3)
                .map(|i| IterRecord {
                    iteration: i,
                    n_points: 4 + i,
                    n_triangles: 2 + 2 * i,
                    eps_hat_max: 0.5 / (i + 1) as f64,
                    inserted: None,
                    new_samples: 10,
                })
                .collect(),
            certified_bound: 0.2,
            min_radius: 0.01,
            max_gradient_ratio: 0.5,
            total_samples: 30,
        }
    }

    #[test]
    fn csv_rows() {
        let s = report_csv(&report());
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "0,4,2,5e-1");
    }

    #[test]
    fn svg_is_well_formed() {
        let s = convergence_svg(&report(), 0.05);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<polyline").count(), 1);
    }
}
