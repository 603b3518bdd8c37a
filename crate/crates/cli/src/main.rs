mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use args::{
    BijectionArgs, BurnArgs, Cli, Command, EnumerateArgs, ExperimentArgs, ExperimentKind, Format, RegionArgs,
    SampleArgs, SandpileArgs,
};
use sandpile_core::bijection::{
    anchored_burn, anchored_forward, anchored_inverse, classic_burn, classic_forward, classic_inverse,
};
use sandpile_core::experiments::{self as exp, CylinderEvent, ExperimentConfig, Manifest, RunInfo, TrialSummary};
use sandpile_core::lattice::{spanning_tree_count, RegionSpec, Shape};
use sandpile_core::sandpile::{enumerate_recurrent, HeightRecord};
use sandpile_core::tree::{enumerate_spanning_trees, TreeRecord};
use sandpile_core::wilson::{rng::derive_seed, sample_ust};
use sandpile_core::{Anchor, Error, OrientedTree, Point, Result, SandpileConfig, WiredGraph};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // clap's message spans several lines; keep everything before the
            // usage block on one line
            let msg = e.to_string();
            let head: Vec<&str> = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!("error[usage]: {}", head.join(" ").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), e.to_string().replace('\n', "; "));
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::SampleTree(a) => sample_tree(a),
        Command::SampleSandpile(a) => sample_sandpile(a),
        Command::Burn(a) => burn(a),
        Command::Bijection(a) => bijection(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Experiment(a) => experiment(a),
    }
}

struct Region {
    spec: RegionSpec,
    graph: WiredGraph,
    anchor: Option<Anchor>,
}

fn region(args: &RegionArgs, k: usize, doc: Option<&Value>) -> Result<Region> {
    let shape = match (args.ball, args.box_side) {
        (Some(radius), None) => Some(Shape::Ball { radius }),
        (None, Some(side)) => Some(Shape::Box { side }),
        _ => None,
    };
    let mut spec = match (shape, doc.and_then(|d| d.get("region"))) {
        (Some(shape), _) => RegionSpec { dimension: args.d, shape, anchor_radii: Vec::new() },
        (None, Some(r)) => serde_json::from_value(r.clone())?,
        (None, None) => return Err(Error::Precondition("one of --ball or --box is required".into())),
    };
    let graph = spec.build()?;
    let anchor = if k == 0 { None } else { Some(Anchor::euclidean(spec.dimension, k)?) };
    spec.anchor_radii = anchor.as_ref().map_or(Vec::new(), |a| (1..=a.effective_depth(&graph) as u32).collect());
    Ok(Region { spec, graph, anchor })
}

impl Region {
    fn forward(&self, eta: &SandpileConfig) -> Result<OrientedTree> {
        match &self.anchor {
            Some(a) => anchored_forward(&self.graph, eta, a),
            None => classic_forward(&self.graph, eta),
        }
    }

    fn inverse(&self, t: &OrientedTree) -> Result<SandpileConfig> {
        match &self.anchor {
            Some(a) => anchored_inverse(&self.graph, t, a),
            None => classic_inverse(&self.graph, t),
        }
    }

    fn tree_doc(&self, t: &OrientedTree, seed: Option<u64>) -> Value {
        json!({ "region": self.spec, "seed": seed, "tree": t.to_records(&self.graph) })
    }

    fn heights_doc(&self, eta: &SandpileConfig, seed: Option<u64>) -> Value {
        json!({ "region": self.spec, "seed": seed, "heights": eta.to_records(&self.graph) })
    }
}

fn read_doc(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn doc_field<T: serde::de::DeserializeOwned>(doc: &Value, field: &str) -> Result<T> {
    let v = doc.get(field).ok_or_else(|| Error::Parse(format!("input document has no \"{field}\" field")))?;
    Ok(serde_json::from_value(v.clone())?)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn sample_tree(a: SampleArgs) -> Result<()> {
    let r = region(&a.region, 0, None)?;
    let t = sample_ust(&r.graph, a.seed);
    emit(a.out.as_ref(), &pretty(&r.tree_doc(&t, Some(a.seed)))?)
}

fn sample_sandpile(a: SandpileArgs) -> Result<()> {
    let r = region(&a.region, a.k, None)?;
    let eta = r.inverse(&sample_ust(&r.graph, a.seed))?;
    let text = match a.format {
        Format::Json => pretty(&r.heights_doc(&eta, Some(a.seed)))?,
        Format::Csv => eta.to_csv(&r.graph),
    };
    emit(a.out.as_ref(), &text)
}

/// The configuration named by `--input`, or an exact sample for `--seed`.
fn config_input(region_args: &RegionArgs, k: usize, input: Option<&PathBuf>, seed: Option<u64>) -> Result<(Region, SandpileConfig)> {
    match (input, seed) {
        (Some(path), _) => {
            let doc = read_doc(path)?;
            let r = region(region_args, k, Some(&doc))?;
            let records: Vec<HeightRecord> = doc_field(&doc, "heights")?;
            let eta = SandpileConfig::from_records(&r.graph, &records)?;
            Ok((r, eta))
        }
        (None, Some(seed)) => {
            let r = region(region_args, k, None)?;
            let eta = r.inverse(&sample_ust(&r.graph, seed))?;
            Ok((r, eta))
        }
        (None, None) => Err(Error::Precondition("one of --input or --seed is required".into())),
    }
}

fn burn(a: BurnArgs) -> Result<()> {
    let (r, eta) = config_input(&a.region, a.k, a.input.as_ref(), a.seed)?;
    let schedule = match &r.anchor {
        Some(anchor) => anchored_burn(&r.graph, &eta, anchor)?,
        None => classic_burn(&r.graph, &eta)?,
    };
    emit(a.out.as_ref(), &schedule.to_csv(&r.graph))
}

fn bijection(a: BijectionArgs) -> Result<()> {
    if a.forward {
        let (r, eta) = config_input(&a.region, a.k, a.input.as_ref(), a.seed)?;
        let t = r.forward(&eta)?;
        return emit(a.out.as_ref(), &pretty(&r.tree_doc(&t, a.seed))?);
    }
    if a.inverse {
        let (r, t) = match (a.input.as_ref(), a.seed) {
            (Some(path), _) => {
                let doc = read_doc(path)?;
                let r = region(&a.region, a.k, Some(&doc))?;
                let records: Vec<TreeRecord> = doc_field(&doc, "tree")?;
                let t = OrientedTree::from_records(&r.graph, &records)?;
                (r, t)
            }
            (None, Some(seed)) => {
                let r = region(&a.region, a.k, None)?;
                let t = sample_ust(&r.graph, seed);
                (r, t)
            }
            (None, None) => return Err(Error::Precondition("one of --input or --seed is required".into())),
        };
        let eta = r.inverse(&t)?;
        return emit(a.out.as_ref(), &pretty(&r.heights_doc(&eta, a.seed))?);
    }
    let seed = a.seed.ok_or_else(|| Error::Precondition("--roundtrip needs --seed".into()))?;
    let r = region(&a.region, a.k, None)?;
    let mut identical = 0u64;
    for i in 0..a.trials {
        let t = sample_ust(&r.graph, derive_seed(seed, i));
        let eta = r.inverse(&t)?;
        if r.forward(&eta)? == t && r.inverse(&r.forward(&eta)?)? == eta {
            identical += 1;
        }
    }
    emit(a.out.as_ref(), &format!("{identical}/{} identical\n", a.trials))?;
    if identical != a.trials {
        return Err(Error::Internal(format!("{} round trips differ", a.trials - identical)));
    }
    Ok(())
}

fn enumerate(a: EnumerateArgs) -> Result<()> {
    let r = region(&a.region, 0, None)?;
    let recurrent = enumerate_recurrent(&r.graph, a.budget)?;
    let trees = enumerate_spanning_trees(&r.graph, a.budget)?;
    let det = spanning_tree_count(&r.graph);
    let agree = det == recurrent.len().into() && det == trees.len().into();
    let mut text = format!(
        "sites {}\nrecurrent {}\ntrees {}\ndet {}\nagree {}\n",
        r.graph.len(),
        recurrent.len(),
        trees.len(),
        det,
        agree
    );
    if a.list {
        for eta in &recurrent {
            let h: Vec<String> = eta.heights.iter().map(u32::to_string).collect();
            text.push_str(&h.join(","));
            text.push('\n');
        }
    }
    emit(None, &text)?;
    if !agree {
        return Err(Error::Internal("counts disagree".into()));
    }
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::new(a.d, a.k, a.radii.clone(), a.trials, a.seed);
    cfg.outer_factor = a.outer_factor;
    if let Some(r) = a.reference_radius {
        cfg.reference_radius = r;
    }
    cfg.validate()?;
    let mut extra = serde_json::Map::new();
    let mut notes = Vec::new();
    let start = Instant::now();
    let summary: TrialSummary = match a.kind {
        ExperimentKind::Coupling => {
            notes.push(format!("outer volume of each coupled pair: ball({} * N)", cfg.outer_factor));
            exp::with_threads(a.threads, || exp::coupling_experiment(&cfg))??
        }
        ExperimentKind::Fit => {
            notes.push(format!("outer volume of each coupled pair: ball({} * N)", cfg.outer_factor));
            notes.push("fit: least squares of ln(rate) on ln(N); rate ~ C N^-alpha".into());
            let (s, fit) = exp::with_threads(a.threads, || exp::fit_experiment(&cfg))??;
            extra.insert("fit".into(), serde_json::to_value(fit)?);
            s
        }
        ExperimentKind::Tv => {
            let event = match &a.event {
                Some(text) => serde_json::from_str(text)?,
                None => CylinderEvent::SiteHeight { k: cfg.k, site: Point::origin(cfg.dimension), height: 2 * cfg.dimension as u32 - 1 },
            };
            event.validate(&cfg.anchor()?)?;
            notes.push(format!(
                "infinite volume approximated by ball({}); differences are against that reference",
                cfg.reference_radius
            ));
            extra.insert("event".into(), serde_json::to_value(&event)?);
            exp::with_threads(a.threads, || exp::tv_experiment(&cfg, &event))??
        }
        ExperimentKind::Offsets => {
            let x = match &a.x {
                Some(c) => Point::new(c)?,
                None => Point::origin(cfg.dimension).step(0),
            };
            notes.push("volumes at all radii share arrow stacks within a trial".into());
            extra.insert("x".into(), serde_json::to_value(x)?);
            exp::with_threads(a.threads, || exp::offsets_experiment(&cfg, &x))??
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    print!("{}", summary.to_csv());
    if let Some(dir) = &a.out_dir {
        let mut config = serde_json::to_value(&cfg)?;
        if let Value::Object(map) = &mut config {
            map.extend(extra);
        }
        let threads = if a.threads == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { a.threads };
        let mut manifest = Manifest::new(&summary.experiment, cfg.seed, config, RunInfo::collect(elapsed, threads));
        manifest.notes = notes;
        exp::write_outputs(dir, &summary, &mut manifest)?;
    }
    Ok(())
}
