//! Run settings: defaults, then the settings file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use memevo::{parse_settings, EvolutionConfig};

use crate::RunArgs;

/// Manifest keys that describe a finished run rather than configure one.
pub const MANIFEST_ONLY_KEYS: [&str; 4] = [
    "kb_assertions",
    "engine_version",
    "started_unix",
    "finished_unix",
];

#[derive(Debug)]
pub struct RunSettings {
    pub kb: PathBuf,
    pub base: PathBuf,
    pub config: EvolutionConfig,
}

pub fn resolve(args: &RunArgs) -> Result<RunSettings> {
    let mut config = EvolutionConfig::default();
    let (mut kb, mut base) = (None, None);
    let mut seed_given = false;

    if let Some(path) = &args.config {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new(""));
        let entries =
            parse_settings(&text).with_context(|| format!("parsing {}", path.display()))?;
        for (key, value) in entries {
            match key.as_str() {
                "kb" => kb = Some(dir.join(value)),
                "base" => base = Some(dir.join(value)),
                k if MANIFEST_ONLY_KEYS.contains(&k) => {}
                k => {
                    let known = config
                        .set(k, &value)
                        .with_context(|| format!("in {}", path.display()))?;
                    if !known {
                        bail!("unknown setting {k:?} in {}", path.display());
                    }
                    seed_given |= k == "seed";
                }
            }
        }
    }

    if let Some(p) = &args.kb {
        kb = Some(p.clone());
    }
    if let Some(p) = &args.base {
        base = Some(p.clone());
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
        seed_given = true;
    }
    macro_rules! override_with {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = args.$flag { config.$field = v; })*
        };
    }
    override_with!(
        pop_size => pop_size,
        pc => p_c,
        pm => p_m,
        cmax => c_max,
        rmin => r_min,
        timeout => timeout,
        tournament_size => tournament_size,
        win_prob => win_prob,
        generations => max_generations
    );
    if args.target_fitness.is_some() {
        config.target_fitness = args.target_fitness;
    }
    if args.no_elitism {
        config.elitism = false;
    }
    if args.serial {
        config.parallel = false;
    }
    if !seed_given {
        config.seed = rand::random();
    }
    config.validate().context("invalid configuration")?;

    let Some(kb) = kb else {
        bail!("no knowledge base: pass --kb or set `kb` in --config");
    };
    let Some(base) = base else {
        bail!("no base network: pass --base or set `base` in --config");
    };
    Ok(RunSettings { kb, base, config })
}
