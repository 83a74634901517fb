use std::fs;
use std::path::PathBuf;

use nonmarkov_core::measures::{
    detect_intervals, integrated_measures, measure_trace, measure_trace_rwa, MeasureOptions,
    MeasureTrace, Variant,
};
use nonmarkov_core::positivity::positivity_report;
use nonmarkov_core::spectral::{parse_config, preset, FrequencyConvention, SpectralParams};
use nonmarkov_core::tcl::{evaluate_trace, time_grid};

use crate::{failure, usage, CliError, RunArgs};

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Coefficients,
    Measures,
    Positivity,
}

/// One fully resolved sweep. A figure id normally yields one of these;
/// figure 4 fans out into three (one per bundled parameter set).
struct Sweep {
    params: SpectralParams,
    tmax: f64,
    label: String,
}

/// Windows for the bundled figures. The presets share the parameter tags:
/// panels a/b/c of every figure reuse sets (a)/(b)/(c); figure 4 spans two
/// bath correlation times of each set.
fn figure_sweeps(id: &str, kind: Kind, args: &RunArgs) -> Result<Vec<Sweep>, CliError> {
    let id = id.to_ascii_lowercase();
    let expected = match id.as_str() {
        "1a" | "1b" | "1c" | "1d" => Kind::Coefficients,
        "2a" | "2b" | "2c" | "3a" | "3b" | "3c" => Kind::Measures,
        "4" => Kind::Positivity,
        other => return Err(usage(format!("unknown figure id '{other}'"))),
    };
    if expected != kind {
        let cmd = match expected {
            Kind::Coefficients => "coefficients",
            Kind::Measures => "measures",
            Kind::Positivity => "positivity",
        };
        return Err(usage(format!("figure {id} belongs to the `{cmd}` command")));
    }
    if id == "4" {
        return ['a', 'b', 'c']
            .iter()
            .map(|&tag| {
                let (params, _) = preset(tag).map_err(failure)?;
                Ok(Sweep {
                    params,
                    tmax: args.tmax.unwrap_or(2.0 * params.tau_r()),
                    label: format!("4{tag}"),
                })
            })
            .collect();
    }
    let tag = id.chars().last().expect("two-character id");
    let (params, window) = preset(tag).map_err(failure)?;
    Ok(vec![Sweep {
        params,
        tmax: args.tmax.unwrap_or(window),
        label: id,
    }])
}

fn resolve(args: &RunArgs, kind: Kind) -> Result<Vec<Sweep>, CliError> {
    if kind != Kind::Measures && (args.variant.is_some() || args.compare_rwa || args.tol.is_some())
    {
        return Err(usage(
            "--variant, --compare-rwa and --tol apply to the `measures` command",
        ));
    }
    if args.grid < 2 {
        return Err(usage(format!(
            "--grid must be at least 2 (got {})",
            args.grid
        )));
    }
    if let Some(t) = args.tmax {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage(format!("--tmax must be positive (got {t})")));
        }
    }
    let sweeps = match (&args.figure, &args.config) {
        (Some(id), None) => figure_sweeps(id, kind, args)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            let (params, convention) = parse_config(&text).map_err(|e| usage(e.to_string()))?;
            if convention == FrequencyConvention::HalfLine {
                return Err(usage(
                    "half-line kernels are quadrature-backed and pointwise only; \
                     grid sweeps use the full-line closed form",
                ));
            }
            let tmax = args
                .tmax
                .ok_or_else(|| usage("--tmax is required with --config"))?;
            vec![Sweep {
                params,
                tmax,
                label: "custom".into(),
            }]
        }
        (None, None) => return Err(usage("one of --figure or --config is required")),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };
    Ok(sweeps)
}

fn out_file(args: &RunArgs, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&args.out)?;
    Ok(args.out.join(name))
}

pub fn coefficients(args: &RunArgs) -> Result<(), CliError> {
    for sweep in resolve(args, Kind::Coefficients)? {
        let grid = time_grid(sweep.tmax, args.grid);
        let trace = evaluate_trace(&sweep.params, &grid, args.order).map_err(failure)?;
        let path = out_file(args, &format!("coefficients_{}.csv", sweep.label))?;
        trace.write_csv(fs::File::create(&path)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Re-detects the interval lists at a user-supplied threshold. The
/// rotating-wave lists stay a single detection (they coincide by
/// construction, not by agreement of two detections).
fn apply_tol(mt: &mut MeasureTrace, tol: f64) {
    mt.tol = tol;
    mt.idi = detect_intervals(&mt.grid, &mt.g, tol);
    mt.ibi = if mt.variant == Variant::Rwa {
        mt.idi.clone()
    } else {
        detect_intervals(&mt.grid, &mt.sigma, tol)
    };
}

pub fn measures(args: &RunArgs) -> Result<(), CliError> {
    let variant = args.variant.unwrap_or(Variant::Full);
    for sweep in resolve(args, Kind::Measures)? {
        let grid = time_grid(sweep.tmax, args.grid);
        let opts = MeasureOptions::default();
        let mut runs = Vec::new();
        if variant == Variant::Rwa {
            // no coefficient sweep needed: the reference model is closed form
            runs.push(measure_trace_rwa(&sweep.params, &grid, &opts).map_err(failure)?);
        } else {
            let trace = evaluate_trace(&sweep.params, &grid, args.order).map_err(failure)?;
            runs.push(measure_trace(&trace, variant, &opts).map_err(failure)?);
            if args.compare_rwa {
                runs.push(measure_trace_rwa(&sweep.params, &grid, &opts).map_err(failure)?);
            }
        }
        for mut mt in runs {
            if let Some(tol) = args.tol {
                apply_tol(&mut mt, tol);
            }
            let stem = format!("{}_{}", sweep.label, mt.variant);
            let path = out_file(args, &format!("measures_{stem}.csv"))?;
            mt.write_csv(fs::File::create(&path)?)?;
            println!("wrote {}", path.display());
            let path = out_file(args, &format!("intervals_{stem}.json"))?;
            fs::write(&path, mt.intervals_json())?;
            println!("wrote {}", path.display());
            let (n_blp, i_rhp) = integrated_measures(&mt);
            println!("measures {stem}: N_BLP = {n_blp:.6e}, I_RHP = {i_rhp:.6e}");
        }
    }
    Ok(())
}

pub fn positivity(args: &RunArgs) -> Result<(), CliError> {
    for sweep in resolve(args, Kind::Positivity)? {
        let grid = time_grid(sweep.tmax, args.grid);
        let trace = evaluate_trace(&sweep.params, &grid, args.order).map_err(failure)?;
        let report = positivity_report(&trace);
        let path = out_file(args, &format!("positivity_{}.csv", sweep.label))?;
        report.write_csv(fs::File::create(&path)?)?;
        println!("wrote {}", path.display());
        let ok = report.g_positive_on(sweep.params.tau_r());
        println!(
            "positivity {}: G > 0 through one correlation time: {}",
            sweep.label,
            if ok { "yes" } else { "no" }
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nonmarkov_core::tcl::TclOrder;

    fn args() -> RunArgs {
        RunArgs {
            figure: None,
            config: None,
            order: TclOrder::Tcl4,
            variant: None,
            compare_rwa: false,
            out: "out".into(),
            grid: 400,
            tmax: None,
            tol: None,
        }
    }

    #[test]
    fn figure_table_windows() {
        let a = args();
        for (id, kind, tmax) in [
            ("1a", Kind::Coefficients, 30.0),
            ("1b", Kind::Coefficients, 1.5),
            ("1c", Kind::Coefficients, 0.05),
            ("1d", Kind::Coefficients, 30.0),
            ("2a", Kind::Measures, 30.0),
            ("3b", Kind::Measures, 1.5),
            ("3c", Kind::Measures, 0.05),
        ] {
            let sweeps = figure_sweeps(id, kind, &a).unwrap();
            assert_eq!(sweeps.len(), 1);
            assert_eq!(sweeps[0].tmax, tmax, "{id}");
            assert_eq!(sweeps[0].label, id);
        }
    }

    #[test]
    fn figure_four_fans_out_per_correlation_time() {
        let sweeps = figure_sweeps("4", Kind::Positivity, &args()).unwrap();
        assert_eq!(sweeps.len(), 3);
        let windows: Vec<f64> = sweeps.iter().map(|s| s.tmax).collect();
        assert_eq!(windows, vec![10.0, 0.4, 0.005]);
        assert_eq!(sweeps[2].label, "4c");
    }

    #[test]
    fn figure_preset_parameters_are_exact() {
        let s = &figure_sweeps("1a", Kind::Coefficients, &args()).unwrap()[0];
        assert_eq!(
            (
                s.params.gamma0,
                s.params.omega0,
                s.params.lambda,
                s.params.delta
            ),
            (1.0, 100.0, 0.2, 2.0)
        );
        let s = &figure_sweeps("1c", Kind::Coefficients, &args()).unwrap()[0];
        assert_eq!((s.params.lambda, s.params.delta), (400.0, 10.0));
    }

    #[test]
    fn command_figure_mismatch_is_usage() {
        for (id, kind) in [
            ("2a", Kind::Coefficients),
            ("1a", Kind::Measures),
            ("4", Kind::Measures),
            ("1b", Kind::Positivity),
        ] {
            assert!(matches!(
                figure_sweeps(id, kind, &args()),
                Err(CliError::Usage(_))
            ));
        }
        assert!(matches!(
            figure_sweeps("5x", Kind::Measures, &args()),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn measure_flags_rejected_elsewhere() {
        let mut a = args();
        a.figure = Some("1a".into());
        a.compare_rwa = true;
        assert!(matches!(
            resolve(&a, Kind::Coefficients),
            Err(CliError::Usage(_))
        ));
        a.compare_rwa = false;
        assert!(resolve(&a, Kind::Coefficients).is_ok());
    }

    #[test]
    fn config_requires_window() {
        let dir = std::env::temp_dir().join("nonmarkov-cli-unit");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("params.conf");
        fs::write(&path, "lambda = 1\ndelta = 0\nomega0 = 10\n").unwrap();
        let mut a = args();
        a.config = Some(path);
        assert!(matches!(
            resolve(&a, Kind::Measures),
            Err(CliError::Usage(_))
        ));
        a.tmax = Some(1.0);
        let sweeps = resolve(&a, Kind::Measures).unwrap();
        assert_eq!(sweeps[0].label, "custom");
        assert_eq!(sweeps[0].params.gamma0, 1.0);
    }
}
