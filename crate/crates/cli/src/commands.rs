use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use ergm_sampled::design::{design_probability_bounded, design_probability_mc, realize_seeded};
use ergm_sampled::io::{
    self as eio, read_partial_adjacency_csv, read_partial_json, write_figure2_csv, write_fit_json, write_json,
    write_partial_adjacency_csv, write_partial_json, write_records_json, write_summary_csv, AdjacencySource,
};
use ergm_sampled::kl::{kl_divergence, mean_value_params, KlConfig};
use ergm_sampled::mcmc::{simulate_full, ErgmModel, McmcConfig};
use ergm_sampled::mle::{mle_complete, mle_missing, FitConfig, FitResult};
use ergm_sampled::study::{complete_sampling_sd, figure2_data, run_study, summarize, StudyConfig};
use ergm_sampled::{
    ht_estimate, lazega_specs, load_dataset, parse_specs, trace, DatasetBundle, DatasetPaths, DesignSpec,
    HtError, InitialSample, Network, NodeAttributes, NodeSet, PartialNetwork, StatisticSpec, WaveBound,
};
use serde_json::json;

use crate::args::*;
use crate::Failure;

type Outcome = Result<(), Failure>;

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(anyhow!("{msg}"))
}

fn output(cli_out: &Option<std::path::PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match cli_out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_vector(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| usage(format!("{what}: `{v}` is not a number"))))
        .collect()
}

fn specs(model: &ModelArgs, default: &str) -> Result<Vec<StatisticSpec>, Failure> {
    let terms = model.terms.as_deref().unwrap_or(default);
    if terms.trim() == "lazega" {
        return Ok(lazega_specs());
    }
    parse_specs(terms).map_err(usage)
}

fn load(data: &DataArgs) -> Result<Option<DatasetBundle>, Failure> {
    let adjacency = match (&data.adjacency, &data.edges, &data.lazega) {
        (Some(path), _, _) => AdjacencySource::Matrix(path.clone()),
        (_, Some(path), _) => AdjacencySource::EdgeList {
            path: path.clone(),
            n: data.nodes,
        },
        (_, _, Some(dir)) => {
            if data.directed {
                return Err(usage("the collaboration bundle is undirected"));
            }
            return Ok(Some(eio::load_lazega(dir)?));
        }
        _ => return Ok(None),
    };
    Ok(Some(load_dataset(&DatasetPaths {
        adjacency,
        attributes: data.attributes.clone(),
        directed: data.directed,
    })?))
}

fn require_network(data: &DataArgs) -> Result<DatasetBundle, Failure> {
    load(data)?.ok_or_else(|| usage("a network is required (--adjacency, --edges or --lazega)"))
}

/// Node count, directedness and attributes for commands that only need the
/// network space.
fn space(data: &DataArgs) -> Result<(usize, bool, NodeAttributes), Failure> {
    if let Some(bundle) = load(data)? {
        return Ok((bundle.network.n(), bundle.network.is_directed(), bundle.attrs));
    }
    let n = data.nodes.ok_or_else(|| usage("give --nodes or a network"))?;
    let attrs = match &data.attributes {
        Some(path) => eio::read_attributes_csv(eio::open(path)?, None, n)?,
        None => NodeAttributes::new(n),
    };
    Ok((n, data.directed, attrs))
}

fn mcmc_config(chain: &ChainArgs, n: usize, seed: u64) -> McmcConfig {
    let mut cfg = McmcConfig::for_size(n, chain.draws, seed);
    if let Some(b) = chain.burn_in {
        cfg.burn_in = b;
    }
    if let Some(t) = chain.thin {
        cfg.thin = t;
    }
    cfg
}

fn fit_config(control: &FitControl, seed: u64) -> FitConfig {
    FitConfig {
        draws: control.draws,
        burn_in: control.burn_in,
        thin: control.thin,
        max_anchors: control.max_anchors,
        convergence_se: control.convergence_se,
        eta_bound: control.eta_bound,
        seed,
        ..FitConfig::default()
    }
}

fn design_spec(args: &DesignArgs, directed: bool) -> Result<DesignSpec, Failure> {
    let initial = match (args.psi, args.seeds) {
        (Some(psi), None) => InitialSample::Bernoulli { psi },
        (None, Some(m)) => InitialSample::FixedSeeds { m },
        (None, None) => return Err(usage("give --psi or --seeds")),
        (Some(_), Some(_)) => return Err(usage("--psi and --seeds are exclusive")),
    };
    Ok(match args.design {
        DesignKind::Ego => DesignSpec {
            initial,
            ..DesignSpec::ego_centric(directed, 0.0)
        },
        DesignKind::Trace => {
            let waves = match args.waves.as_str() {
                "sat" | "saturated" => WaveBound::Saturated,
                k => WaveBound::Finite(k.parse().map_err(|_| usage(format!("--waves: `{k}` is not a count or `sat`")))?),
            };
            DesignSpec::link_tracing(directed, waves, initial)
        }
    })
}

fn read_partial(path: &Path, directed: bool) -> Result<PartialNetwork, Failure> {
    let file = eio::open(path)?;
    let partial = if path.extension().is_some_and(|e| e == "csv") {
        read_partial_adjacency_csv(file, directed)?
    } else {
        read_partial_json(file)?
    };
    Ok(partial)
}

fn fit_outcome(fit: &FitResult) -> Outcome {
    if fit.degenerate {
        Err(Failure::Outcome(
            "degenerate MLE: the observed statistics lie on the boundary of the convex hull".into(),
        ))
    } else if !fit.converged {
        Err(Failure::Outcome("MCMC-MLE did not converge within the anchor limit".into()))
    } else {
        Ok(())
    }
}

fn write_fit(out: &mut dyn Write, format: Format, fit: &FitResult) -> Outcome {
    match format {
        Format::Json => write_fit_json(out, fit)?,
        Format::Csv => {
            writeln!(out, "parameter,eta_hat,std_error,mean_value,mean_value_se")?;
            for (k, term) in fit.terms.iter().enumerate() {
                let cell = |v: &Option<Vec<f64>>| v.as_ref().map_or(String::new(), |v| v[k].to_string());
                writeln!(
                    out,
                    "{term},{},{},{},{}",
                    cell(&fit.eta_hat),
                    cell(&fit.std_errors),
                    cell(&fit.mean_value),
                    cell(&fit.mean_value_se)
                )?;
            }
        }
    }
    Ok(())
}

pub fn run(cli: Cli) -> Outcome {
    let seed = cli.rng_seed;
    let format = cli.format;
    match &cli.command {
        Command::Simulate(a) => {
            let (n, directed, attrs) = space(&a.data)?;
            let specs = specs(&a.model, "edges")?;
            let eta = parse_vector(&a.eta, "--eta")?;
            let model = ErgmModel::new(specs, eta, attrs, n, directed).map_err(usage)?;
            let chain = simulate_full(&model, Network::empty(n, directed), &mcmc_config(&a.chain, n, seed), true)?;
            let mut out = output(&cli.out)?;
            let labels: Vec<String> = model.specs().iter().map(StatisticSpec::label).collect();
            match format {
                Format::Csv => {
                    writeln!(out, "{}", labels.join(","))?;
                    for row in chain.stats.rows() {
                        writeln!(out, "{}", row.iter().map(f64::to_string).collect::<Vec<_>>().join(","))?;
                    }
                }
                Format::Json => {
                    let draws: Vec<_> = chain
                        .networks
                        .unwrap_or_default()
                        .iter()
                        .zip(chain.stats.rows())
                        .map(|(y, z)| json!({"stats": z, "edges": y.edges().map(|d| [d.i + 1, d.j + 1]).collect::<Vec<_>>()}))
                        .collect();
                    write_json(
                        &mut out,
                        "simulation",
                        &json!({"terms": labels, "acceptance_rate": chain.acceptance_rate, "draws": draws}),
                    )?;
                }
            }
            out.flush()?;
            Ok(())
        }
        Command::Sample(a) => {
            let bundle = require_network(&a.data)?;
            let y = &bundle.network;
            let spec = design_spec(&a.design, y.is_directed())?;
            spec.validate(y.n()).map_err(usage)?;
            let realization = match &a.seed_pair {
                Some(text) => {
                    let nodes = text
                        .split(',')
                        .map(|v| v.trim().parse::<usize>().ok().filter(|&k| k >= 1).map(|k| k - 1))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| usage(format!("--seed-pair: `{text}` is not `i,j`")))?;
                    let s0 = NodeSet::from_nodes(y.n(), nodes).map_err(usage)?;
                    trace(&spec, y, &s0)?
                }
                None => realize_seeded(&spec, y, seed)?,
            };
            eprintln!(
                "sampled {} nodes in {} waves; {} of {} dyads observed{}",
                realization.sampled_nodes(),
                realization.pattern.waves().len(),
                realization.observed_dyads(),
                y.dyad_count(),
                if realization.exhausted { " (exhausted)" } else { "" }
            );
            let partial = PartialNetwork::restrict(y, realization.pattern)?;
            let mut out = output(&cli.out)?;
            match format {
                Format::Json => write_partial_json(&mut out, &partial)?,
                Format::Csv => write_partial_adjacency_csv(&mut out, &partial)?,
            }
            out.flush()?;
            Ok(())
        }
        Command::Fit(a) => {
            let bundle = require_network(&a.data)?;
            let specs = specs(&a.model, "edges")?;
            let fit = mle_complete(&bundle.network, &bundle.attrs, &specs, &fit_config(&a.control, seed))?;
            let mut out = output(&cli.out)?;
            write_fit(&mut out, format, &fit)?;
            out.flush()?;
            fit_outcome(&fit)
        }
        Command::FitMissing(a) => {
            let partial = read_partial(&a.partial, a.directed)?;
            let attrs = match &a.attributes {
                Some(path) => eio::read_attributes_csv(eio::open(path)?, None, partial.n())?,
                None => NodeAttributes::new(partial.n()),
            };
            let specs = specs(&a.model, "edges")?;
            let fit = mle_missing(&partial, &attrs, &specs, &fit_config(&a.control, seed))?;
            let mut out = output(&cli.out)?;
            write_fit(&mut out, format, &fit)?;
            out.flush()?;
            fit_outcome(&fit)
        }
        Command::Kl(a) => {
            let (n, directed, attrs) = space(&a.data)?;
            let specs = specs(&a.model, "edges")?;
            let xi = parse_vector(&a.xi, "--xi")?;
            let eta = parse_vector(&a.eta, "--eta")?;
            let cfg = KlConfig {
                mcmc: mcmc_config(&a.chain, n, seed),
                bridge_steps: a.bridge_steps,
            };
            let kl = kl_divergence(&xi, &eta, &specs, &attrs, n, directed, &cfg).map_err(usage)?;
            let mut out = output(&cli.out)?;
            match format {
                Format::Json => write_json(&mut out, "kl", &kl)?,
                Format::Csv => writeln!(out, "kl,se\n{},{}", kl.value, kl.se)?,
            }
            out.flush()?;
            Ok(())
        }
        Command::DesignProb(a) => {
            let bundle = require_network(&a.data)?;
            let y = &bundle.network;
            let d = read_partial(&a.observed, y.is_directed())?;
            let spec = design_spec(&a.design, y.is_directed())?;
            let (p, se) = match a.mc {
                Some(draws) => design_probability_mc(&spec, d.pattern(), y, draws, seed)?,
                None => (design_probability_bounded(&spec, d.pattern(), y, a.enumeration_bound)?, 0.0),
            };
            let mut out = output(&cli.out)?;
            match format {
                Format::Json => write_json(&mut out, "design_probability", &json!({"probability": p, "se": se, "exact": a.mc.is_none()}))?,
                Format::Csv => writeln!(out, "probability,se\n{p},{se}")?,
            }
            out.flush()?;
            Ok(())
        }
        Command::Ht(a) => {
            let partial = read_partial(&a.partial, a.directed)?;
            let spec = design_spec(&a.design, partial.is_directed())?;
            let est = match ht_estimate(&spec, &partial) {
                Ok(est) => est,
                Err(HtError::Unobservable(scheme)) => {
                    return Err(Failure::Outcome(format!(
                        "refused: dyadic inclusion probabilities are not observable under {scheme}; \
                         no Horvitz-Thompson estimate exists without knowledge of unobserved ties"
                    )))
                }
                Err(e) => return Err(usage(e)),
            };
            let mut out = output(&cli.out)?;
            match format {
                Format::Json => write_json(&mut out, "horvitz_thompson", &est)?,
                Format::Csv => writeln!(
                    out,
                    "total,variance_estimate,standard_error\n{},{},{}",
                    est.total, est.variance_estimate, est.standard_error
                )?,
            }
            out.flush()?;
            Ok(())
        }
        Command::Study(a) => run_study_command(a, seed, format, &cli.out),
        Command::MeanValue(a) => {
            let (n, directed, attrs) = space(&a.data)?;
            let specs = specs(&a.model, "edges")?;
            let eta = parse_vector(&a.eta, "--eta")?;
            let mv = mean_value_params(&eta, &specs, &attrs, n, directed, &mcmc_config(&a.chain, n, seed)).map_err(usage)?;
            let mut out = output(&cli.out)?;
            match format {
                Format::Json => write_json(&mut out, "mean_value", &mv)?,
                Format::Csv => {
                    writeln!(out, "parameter,mean_value,se")?;
                    for (k, s) in specs.iter().enumerate() {
                        writeln!(out, "{},{},{}", s.label(), mv.mean[k], mv.standard_errors[k])?;
                    }
                }
            }
            out.flush()?;
            Ok(())
        }
    }
}

fn run_study_command(a: &StudyArgs, seed: u64, format: Format, out_path: &Option<std::path::PathBuf>) -> Outcome {
    let bundle = match load(&a.data)? {
        Some(b) => b,
        None => eio::load_lazega(Path::new("data/lazega"))?,
    };
    let y = &bundle.network;
    if y.is_directed() {
        bail_usage("the study needs an undirected network")?;
    }
    let specs = specs(&a.model, "lazega")?;
    let fit_cfg = fit_config(&a.control, seed);
    let complete = mle_complete(y, &bundle.attrs, &specs, &fit_cfg)?;
    fit_outcome(&complete)?;
    eprintln!("complete-data fit converged after {} anchors", complete.diagnostics.as_ref().map_or(0, |d| d.anchors));
    let config = StudyConfig {
        fit: fit_cfg,
        kl: KlConfig {
            mcmc: McmcConfig::for_size(y.n(), a.kl_draws, seed),
            bridge_steps: a.bridge_steps,
        },
        waves: a.waves,
        subsample: (!a.full).then_some(a.subsample),
        master_seed: seed,
    };
    let records = run_study(y, &bundle.attrs, &specs, &complete, &config)?;
    let excluded = records.iter().filter(|r| r.is_excluded()).count();
    eprintln!("{} samples, {excluded} excluded", records.len());
    let sds = if a.bootstrap > 0 {
        let eta = complete.eta_hat.as_ref().expect("usable fit");
        Some(complete_sampling_sd(y, &bundle.attrs, &specs, eta, a.bootstrap, &fit_cfg)?)
    } else {
        None
    };
    let observed = ergm_sampled::compute_stats(y, &bundle.attrs, &specs)?;
    let summary = summarize(&records, &complete, observed.as_slice(), sds.as_ref())?;
    if let Some(path) = &a.figure2 {
        write_figure2_csv(File::create(path).with_context(|| format!("creating {}", path.display()))?, &figure2_data(&records, a.outlier_cutoff))?;
    }
    if let Some(path) = &a.records {
        write_records_json(File::create(path).with_context(|| format!("creating {}", path.display()))?, &records)?;
    }
    let mut out = output(out_path)?;
    match format {
        Format::Csv => write_summary_csv(&mut out, &summary)?,
        Format::Json => write_json(
            &mut out,
            "study_summary",
            &json!({"summary": summary, "complete_fit": complete, "bootstrap": sds}),
        )?,
    }
    out.flush()?;
    Ok(())
}

fn bail_usage(msg: &str) -> anyhow::Result<()> {
    bail!("{msg}")
}
