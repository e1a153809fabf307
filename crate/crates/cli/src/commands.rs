use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use memevo::evolution::run_with_observer;
use memevo::sme::GMap;
use memevo::variation::{crossover as cross, mutate_traced, random_network};
use memevo::{
    analogy_fitness, stats_to_csv, KnowledgeBase, ScoreWeights, SemanticNetwork, VariationParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::settings::resolve;
use crate::{CrossoverArgs, GenArgs, KbArgs, MutateArgs, RunArgs, ScoreArgs};

fn load_kb(path: &Path, min_score: f64) -> Result<KnowledgeBase> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (kb, report) = KnowledgeBase::load_assertions(std::io::BufReader::new(file), min_score)
        .with_context(|| format!("loading {}", path.display()))?;
    if report.self_loops_dropped > 0 {
        eprintln!(
            "warning: dropped {} self-loop assertion(s) from {}",
            report.self_loops_dropped,
            path.display()
        );
    }
    Ok(kb)
}

fn load_net(path: &Path) -> Result<SemanticNetwork> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SemanticNetwork::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn seeded(seed: Option<u64>) -> ChaCha8Rng {
    let seed = seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed = {s}");
        s
    });
    ChaCha8Rng::seed_from_u64(seed)
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn mapping_lines(gmap: &GMap) -> String {
    let mut out = String::new();
    for (b, t) in &gmap.concept_map {
        let _ = writeln!(out, "{b} -> {t}");
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn run(args: RunArgs) -> Result<()> {
    let settings = resolve(&args)?;
    let config = &settings.config;
    let kb_path = fs::canonicalize(&settings.kb)
        .with_context(|| format!("opening {}", settings.kb.display()))?;
    let base_path = fs::canonicalize(&settings.base)
        .with_context(|| format!("opening {}", settings.base.display()))?;
    let kb = load_kb(&kb_path, config.r_min)?;
    let base = load_net(&base_path)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let started = unix_now();
    let result = run_with_observer(&kb, &base, config, |_, row| {
        eprintln!(
            "generation {:>3}  best {:.4}  avg {:.4}",
            row.generation, row.best_fitness, row.avg_fitness
        );
    })?;
    let finished = unix_now();

    write(&args.out, "generations.csv", &stats_to_csv(&result.stats))?;
    write(&args.out, "best.semnet", &result.best.network.render())?;
    write(&args.out, "best.dot", &result.best.network.to_dot())?;
    write(
        &args.out,
        "mapping.txt",
        &mapping_lines(&result.analogy.gmap),
    )?;

    let mut manifest = String::from("# memevo run manifest; pass it back with --config to rerun\n");
    let _ = writeln!(manifest, "kb = {}", kb_path.display());
    let _ = writeln!(manifest, "kb_assertions = {}", kb.assertions().len());
    let _ = writeln!(manifest, "base = {}", base_path.display());
    let _ = writeln!(manifest, "engine_version = {}", memevo::VERSION);
    let _ = writeln!(manifest, "started_unix = {started}");
    let _ = writeln!(manifest, "finished_unix = {finished}");
    manifest.push_str(&config.to_settings());
    write(&args.out, "manifest", &manifest)?;

    if !result.analogy.exact {
        eprintln!(
            "warning: the final mapping search hit its node budget; the mapping may not be optimal"
        );
    }
    println!("seed = {}", config.seed);
    println!("generations = {}", result.stats.len());
    println!("best_fitness = {:.6}", result.analogy.fitness);
    println!("mapped_relations = {}", result.analogy.gmap.len());
    println!("out = {}", args.out.display());
    Ok(())
}

pub fn score(args: ScoreArgs) -> Result<()> {
    let weights = ScoreWeights {
        base: args.w_base,
        connectivity: args.w_conn,
    };
    if !weights.is_valid() {
        bail!("weights must satisfy w_base > 0 and w_conn >= 0");
    }
    let base = load_net(&args.base)?;
    let target = load_net(&args.target)?;
    let analogy = analogy_fitness(&base, &target, &weights);
    println!("fitness = {:.6}", analogy.fitness);
    println!("mapped_relations = {}", analogy.gmap.len());
    print!("{}", mapping_lines(&analogy.gmap));
    Ok(())
}

pub fn gen(args: GenArgs) -> Result<()> {
    let kb = load_kb(&args.kb.kb, args.kb.rmin)?;
    let params = VariationParams::new(args.cmax, args.timeout)?;
    print!(
        "{}",
        random_network(&kb, &params, &mut seeded(args.seed)).render()
    );
    Ok(())
}

pub fn kb_stats(args: KbArgs) -> Result<()> {
    let file =
        fs::File::open(&args.kb).with_context(|| format!("opening {}", args.kb.display()))?;
    let (kb, report) = KnowledgeBase::load_assertions(std::io::BufReader::new(file), args.rmin)
        .with_context(|| format!("loading {}", args.kb.display()))?;
    println!("assertions = {}", kb.assertions().len());
    println!("concepts = {}", kb.concepts().len());
    println!("labels = {}", kb.labels().len());
    println!("below_min_score = {}", report.below_min_score);
    println!("self_loops_dropped = {}", report.self_loops_dropped);
    println!("duplicates_collapsed = {}", report.duplicates_collapsed);
    for label in kb.labels() {
        let n = kb.assertions().iter().filter(|a| a.label == label).count();
        println!("label {label} = {n}");
    }
    Ok(())
}

pub fn mutate(args: MutateArgs) -> Result<()> {
    let kb = load_kb(&args.kb.kb, args.kb.rmin)?;
    let parent = load_net(&args.net)?;
    let params = VariationParams::new(1, args.timeout)?;
    let out = mutate_traced(&parent, &kb, &params, &mut seeded(args.seed));
    match out.kind {
        Some(kind) => println!("# mutation: {kind:?}"),
        None => println!("# mutation: none feasible, parent returned"),
    }
    print!("{}", out.child.render());
    Ok(())
}

pub fn crossover(args: CrossoverArgs) -> Result<()> {
    let kb = load_kb(&args.kb.kb, args.kb.rmin)?;
    let a = load_net(&args.parent_a)?;
    let b = load_net(&args.parent_b)?;
    let out = cross(&a, &b, &kb, &mut seeded(args.seed));
    println!("# crossover: {:?}", out.kind);
    for (i, child) in out.children.iter().enumerate() {
        println!("# child {}", i + 1);
        print!("{}", child.render());
    }
    Ok(())
}
