//! Self-contained SVG rendering of threshold curves: δ on the horizontal
//! axis, the four attack thresholds and the intercept-resend bound as five
//! line series with distinct dash patterns, plus axes and a legend.

use crate::attacks::{ThresholdCurve, ThresholdRow};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 210.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 70.0;

struct Series {
    name: &'static str,
    dash: &'static str,
    extract: fn(&ThresholdRow) -> f64,
}

const SERIES: [Series; 5] = [
    Series { name: "cloning", dash: "10 4 2 4", extract: |r| r.eta_clone },
    Series { name: "anticloning", dash: "2 4", extract: |r| r.eta_anticlone },
    Series { name: "Bell measurement", dash: "8 5", extract: |r| r.eta_bma },
    Series { name: "optimal Gaussian", dash: "", extract: |r| r.eta_opt },
    Series { name: "intercept-resend", dash: "2 3 10 3 2 7", extract: |r| r.eta_intercept_resend },
];

struct Frame {
    delta_min: f64,
    delta_max: f64,
    eta_max: f64,
}

impl Frame {
    fn from_curve(curve: &ThresholdCurve) -> Frame {
        let mut delta_min = f64::INFINITY;
        let mut delta_max = f64::NEG_INFINITY;
        let mut eta_max = 0.0_f64;
        for row in &curve.rows {
            delta_min = delta_min.min(row.delta);
            delta_max = delta_max.max(row.delta);
            for series in &SERIES {
                let v = (series.extract)(row);
                if v.is_finite() {
                    eta_max = eta_max.max(v);
                }
            }
        }
        if delta_min == delta_max {
            // Degenerate single-δ sweep: pad so the point sits mid-frame.
            let pad = if delta_max == 0.0 { 0.05 } else { delta_max * 0.5 };
            delta_min -= pad;
            delta_max += pad;
        }
        Frame { delta_min, delta_max, eta_max: eta_max.max(1.0) }
    }

    fn x(&self, delta: f64) -> f64 {
        MARGIN_LEFT + (delta - self.delta_min) / (self.delta_max - self.delta_min)
            * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, eta: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - eta / self.eta_max * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn coord(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() { "0".to_owned() } else { s.to_owned() }
}

/// Renders a curve to a standalone SVG document.
pub fn render_svg(curve: &ThresholdCurve) -> String {
    let frame = Frame::from_curve(curve);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"14\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\">security thresholds, V_A = {}</text>\n",
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0,
        tick_label(curve.v_a),
    ));

    // axes
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));

    // ticks
    const TICKS: usize = 5;
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let delta = frame.delta_min + f * (frame.delta_max - frame.delta_min);
        let eta = f * frame.eta_max;
        let xt = frame.x(delta);
        let yt = frame.y(eta);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y0}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            coord(xt),
            coord(xt),
            coord(y0 + 6.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            coord(xt),
            coord(y0 + 24.0),
            tick_label(delta)
        ));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{x0}\" y2=\"{}\" stroke=\"black\"/>\n",
            coord(x0 - 6.0),
            coord(yt),
            coord(yt)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            coord(x0 - 10.0),
            coord(yt + 5.0),
            tick_label(eta)
        ));
    }

    // axis labels
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">excess noise δ</text>\n",
        coord((x0 + x1) / 2.0),
        coord(HEIGHT - 20.0)
    ));
    svg.push_str(&format!(
        "<text x=\"22\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 22 {})\">\
         line transmission η</text>\n",
        coord((y0 + y1) / 2.0),
        coord((y0 + y1) / 2.0)
    ));

    // series
    for series in &SERIES {
        let points: Vec<(f64, f64)> = curve
            .rows
            .iter()
            .filter_map(|row| {
                let v = (series.extract)(row);
                v.is_finite().then(|| (frame.x(row.delta), frame.y(v)))
            })
            .collect();
        let dash_attr = if series.dash.is_empty() {
            String::new()
        } else {
            format!(" stroke-dasharray=\"{}\"", series.dash)
        };
        let point_list = points
            .iter()
            .map(|(x, y)| format!("{},{}", coord(*x), coord(*y)))
            .collect::<Vec<_>>()
            .join(" ");
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"{dash_attr} \
             points=\"{point_list}\"/>\n"
        ));
        if points.len() < 2 {
            // Degenerate series: mark the lone point so it stays visible.
            for (x, y) in &points {
                svg.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"black\"/>\n",
                    coord(*x),
                    coord(*y)
                ));
            }
        }
    }

    // legend
    let lx = WIDTH - MARGIN_RIGHT + 20.0;
    for (i, series) in SERIES.iter().enumerate() {
        let ly = MARGIN_TOP + 22.0 + 26.0 * i as f64;
        let dash_attr = if series.dash.is_empty() {
            String::new()
        } else {
            format!(" stroke-dasharray=\"{}\"", series.dash)
        };
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1.5\"{dash_attr}/>\n",
            coord(lx),
            coord(ly - 5.0),
            coord(lx + 44.0),
            coord(ly - 5.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            coord(lx + 52.0),
            coord(ly),
            series.name
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SweepSpec;

    #[test]
    fn renders_five_series_and_legend() {
        let curve = SweepSpec::new(10.0, 0.0, 0.5, 11).unwrap().run();
        let svg = render_svg(&curve);
        assert_eq!(svg.matches("<polyline").count(), 5);
        for name in ["cloning", "anticloning", "Bell measurement", "optimal Gaussian", "intercept-resend"] {
            assert!(svg.contains(&format!(">{name}</text>")), "missing legend entry {name}");
        }
        assert!(svg.contains("excess noise δ"));
        assert!(svg.contains("line transmission η"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn single_row_renders_degenerate_points() {
        let curve = crate::attacks::threshold_curve(10.0, &[0.1]);
        let svg = render_svg(&curve);
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert_eq!(svg.matches("<circle").count(), 5);
    }

    #[test]
    fn infinite_thresholds_are_dropped_from_series() {
        // v_a < delta makes the Bell-measurement threshold infinite.
        let curve = crate::attacks::threshold_curve(0.1, &[0.05, 0.5]);
        assert!(curve.rows[1].eta_bma.is_infinite());
        let svg = render_svg(&curve);
        // the Bell series keeps only its finite point and gains a marker
        assert_eq!(svg.matches("<circle").count(), 1);
    }
}
