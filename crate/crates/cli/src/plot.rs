use std::path::{Path, PathBuf};

use clap::Args;
use plotters::prelude::*;

use crate::{failure, usage, CliError};

#[derive(Args)]
pub struct PlotArgs {
    /// CSV files produced by the compute commands
    #[arg(required = true, value_name = "CSV")]
    inputs: Vec<PathBuf>,
    /// draw every input into one panel (first solid, the rest dashed)
    #[arg(long)]
    overlay: bool,
    /// which series to draw from measure CSVs: auto, sigma or g
    #[arg(long, default_value = "auto")]
    series: String,
    /// output directory for the rendered images
    #[arg(long, default_value = "out", value_name = "DIR")]
    out: PathBuf,
}

/// A named column pulled out of one CSV, ready to draw.
struct Curve {
    name: String,
    points: Vec<(f64, f64)>,
}

struct Panel {
    stem: String,
    y_label: &'static str,
    curves: Vec<Curve>,
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

/// Loads one CSV and selects the curves its schema implies: coefficient
/// sweeps yield the three dissipative rates, measure sweeps yield sigma (or
/// g on request), positivity reports yield G.
fn load(path: &Path, series: &str) -> Result<Panel, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| usage(format!("{}: {e}", path.display())))?
        .clone();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let row: Result<Vec<f64>, _> = record.iter().map(str::parse).collect();
        rows.push(row.map_err(|e| usage(format!("{}: non-numeric field: {e}", path.display())))?);
    }
    if rows.len() < 2 {
        return Err(usage(format!(
            "{}: need at least two data rows to plot",
            path.display()
        )));
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "panel".into());

    let t = column(&headers, "t")
        .ok_or_else(|| usage(format!("{}: missing column 't'", path.display())))?;
    let pick = |idx: usize| -> Vec<(f64, f64)> { rows.iter().map(|r| (r[t], r[idx])).collect() };
    let sum = |i: usize, j: usize| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (r[t], r[i] + r[j])).collect()
    };
    let require = |name: &str| -> Result<usize, CliError> {
        column(&headers, name)
            .ok_or_else(|| usage(format!("{}: missing column '{name}'", path.display())))
    };

    if headers.iter().any(|h| h == "G-II") {
        if series != "auto" {
            return Err(usage("--series applies to measure CSVs"));
        }
        let curves = vec![
            Curve {
                name: "Gamma-".into(),
                points: sum(require("G-II")?, require("G-IV")?),
            },
            Curve {
                name: "Gamma+".into(),
                points: sum(require("G+II")?, require("G+IV")?),
            },
            Curve {
                name: "Gamma0".into(),
                points: pick(require("G0")?),
            },
        ];
        return Ok(Panel {
            stem,
            y_label: "rate",
            curves,
        });
    }
    if headers.iter().any(|h| h == "sigma") {
        let (name, label) = match series {
            "auto" | "sigma" => ("sigma", "sigma(t)"),
            "g" => ("g", "g(t)"),
            other => return Err(usage(format!("unknown --series '{other}'"))),
        };
        let curves = vec![Curve {
            name: name.into(),
            points: pick(require(name)?),
        }];
        return Ok(Panel {
            stem,
            y_label: label,
            curves,
        });
    }
    if headers.iter().any(|h| h == "Theta") {
        if series != "auto" {
            return Err(usage("--series applies to measure CSVs"));
        }
        let curves = vec![Curve {
            name: "G".into(),
            points: pick(require("G")?),
        }];
        return Ok(Panel {
            stem,
            y_label: "G(t)",
            curves,
        });
    }
    Err(usage(format!(
        "{}: unrecognised CSV schema (expected output of coefficients, measures or positivity)",
        path.display()
    )))
}

fn draw(panel: &Panel, path: &Path) -> Result<(), CliError> {
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in &panel.curves {
        for &(x, y) in &c.points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    let pad = 0.05 * (y1 - y0).max(1e-12);
    let (y0, y1) = (y0 - pad, y1 + pad);

    let root = SVGBackend::new(path, (960, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(failure)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(&panel.stem, ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(42)
        .y_label_area_size(70)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(failure)?;
    chart
        .configure_mesh()
        .x_desc("t")
        .y_desc(panel.y_label)
        .draw()
        .map_err(failure)?;

    const COLORS: [RGBColor; 6] = [BLUE, RED, GREEN, MAGENTA, CYAN, BLACK];
    for (i, curve) in panel.curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let style = ShapeStyle::from(color).stroke_width(2);
        // overlays follow the solid-vs-dashed convention for comparisons
        if i == 0 {
            chart
                .draw_series(LineSeries::new(curve.points.iter().copied(), style))
                .map_err(failure)?
                .label(&curve.name)
                .legend(move |(x, y)| PathElement::new([(x, y), (x + 18, y)], color));
        } else {
            chart
                .draw_series(DashedLineSeries::new(
                    curve.points.iter().copied(),
                    6,
                    3,
                    style,
                ))
                .map_err(failure)?
                .label(&curve.name)
                .legend(move |(x, y)| PathElement::new([(x, y), (x + 18, y)], color));
        }
    }
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.85))
        .draw()
        .map_err(failure)?;
    root.present().map_err(failure)?;
    Ok(())
}

pub fn render(args: &PlotArgs) -> Result<(), CliError> {
    let panels: Vec<Panel> = args
        .inputs
        .iter()
        .map(|p| load(p, &args.series))
        .collect::<Result<_, _>>()?;
    std::fs::create_dir_all(&args.out)?;

    if args.overlay {
        // one panel, one curve per input, labelled by file stem
        let y_label = panels[0].y_label;
        let mut curves = Vec::new();
        for panel in panels {
            if panel.y_label != y_label {
                return Err(usage("overlay inputs must share a schema and series"));
            }
            for curve in panel.curves {
                curves.push(Curve {
                    name: format!("{} {}", panel.stem, curve.name),
                    points: curve.points,
                });
            }
        }
        let stem = format!(
            "{}_overlay",
            args.inputs[0]
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "panel".into())
        );
        let path = args.out.join(format!("{stem}.svg"));
        draw(
            &Panel {
                stem,
                y_label,
                curves,
            },
            &path,
        )?;
        println!("wrote {}", path.display());
    } else {
        for panel in panels {
            let path = args.out.join(format!("{}.svg", panel.stem));
            draw(&panel, &path)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn dir() -> PathBuf {
        let d = std::env::temp_dir().join("nonmarkov-plot-unit");
        fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn schema_detection_and_series_selection() {
        let p = dir().join("measures.csv");
        fs::write(&p, "t,g,sigma,in_idi,in_ibi\n0,0,0,0,0\n1,2,-1,1,0\n").unwrap();
        let panel = load(&p, "auto").unwrap();
        assert_eq!(panel.y_label, "sigma(t)");
        assert_eq!(panel.curves[0].points[1], (1.0, -1.0));
        let panel = load(&p, "g").unwrap();
        assert_eq!(panel.curves[0].points[1], (1.0, 2.0));
        assert!(matches!(load(&p, "bogus"), Err(CliError::Usage(_))));
    }

    #[test]
    fn rates_schema_sums_contributions() {
        let p = dir().join("coefficients.csv");
        fs::write(
            &p,
            "t,S+II,S+IV,S-II,S-IV,G-II,G-IV,G+II,G+IV,G0,alphaII,alphaIV,betaII,betaIV\n\
             0,0,0,0,0,1,0.5,0,0,0,0,0,0,0\n\
             1,0,0,0,0,2,0.25,0,0,0,0,0,0,0\n",
        )
        .unwrap();
        let panel = load(&p, "auto").unwrap();
        assert_eq!(panel.curves.len(), 3);
        assert_eq!(panel.curves[0].points, vec![(0.0, 1.5), (1.0, 2.25)]);
    }

    #[test]
    fn empty_and_malformed_inputs_are_usage_errors() {
        let p = dir().join("empty.csv");
        fs::write(&p, "t,g,sigma,in_idi,in_ibi\n").unwrap();
        assert!(matches!(load(&p, "auto"), Err(CliError::Usage(_))));
        let p = dir().join("words.csv");
        fs::write(&p, "t,g,sigma,in_idi,in_ibi\n0,a,b,0,0\n1,2,3,0,0\n").unwrap();
        assert!(matches!(load(&p, "auto"), Err(CliError::Usage(_))));
        let p = dir().join("mystery.csv");
        fs::write(&p, "x,y\n0,1\n1,2\n").unwrap();
        assert!(matches!(load(&p, "auto"), Err(CliError::Usage(_))));
    }
}
