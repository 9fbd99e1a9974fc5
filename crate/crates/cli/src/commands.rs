use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;
use shobdosetu_core::audio::{read_wav, write_wav, AudioClip, WavEncoding};
use shobdosetu_core::augment::{augment_chunk_with_noise, sample_background, sample_recipe_with, Effect, NoiseSource};
use shobdosetu_core::corpus::{
    build_corpus as run_build, manifest_to_string, parse_manifest, CorpusOptions, EndpointProvider, FileProvider,
    ManifestEntry, NonspeechZones, RemoteProvider, SourceInput, Split,
};
use shobdosetu_core::diarpost::{apply_post, grid_search as run_grid};
use shobdosetu_core::hash::item_hash;
use shobdosetu_core::metrics::{
    align_tokens, corpus_wer, der_components, tokenize_with, write_rttm, Annotation, DerComponents, EditCounts,
    TextNormalization,
};

use crate::config::ToolkitConfig;
use crate::error::{CliError, CliResult};
use crate::inputs::{emit_json, files_with_ext, load_rttm, read_text, write_text};

#[derive(Args, Debug)]
pub struct BuildCorpusArgs {
    /// Chunk document (JSON array) or a directory of them; the file stem is the source id.
    #[arg(long)]
    chunks: PathBuf,
    /// Directory holding `<source_id>.wav` for every chunk document.
    #[arg(long)]
    audio_dir: PathBuf,
    /// Endpoint predictions as JSONL lookup table.
    #[arg(long, conflicts_with = "remote")]
    predictions: Option<PathBuf>,
    /// Query the HTTP endpoint from the config / environment instead.
    #[arg(long)]
    remote: bool,
    /// JSON object mapping source id to `[[start_s, end_s], ...]` non-speech zones.
    #[arg(long)]
    nonspeech: Option<PathBuf>,
    /// Output manifest (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Also write every boundary decision as JSONL.
    #[arg(long)]
    decisions: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    split_ratio: Option<f64>,
    #[arg(long)]
    fuzzy_threshold: Option<f64>,
}

pub fn build_corpus(args: BuildCorpusArgs, cfg: &mut ToolkitConfig, pool: &ThreadPool) -> CliResult<()> {
    cfg.master_seed = args.seed.unwrap_or(cfg.master_seed);
    cfg.split_ratio = args.split_ratio.unwrap_or(cfg.split_ratio);
    cfg.fuzzy_threshold = args.fuzzy_threshold.unwrap_or(cfg.fuzzy_threshold);
    cfg.validate()?;

    let mut sources = Vec::new();
    for file in files_with_ext(&args.chunks, "json")? {
        let source_id = file
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| CliError::input(format!("bad file name {}", file.display())))?
            .to_owned();
        sources.push(SourceInput {
            audio_path: args.audio_dir.join(format!("{source_id}.wav")),
            chunks_json: read_text(&file)?,
            source_id,
        });
    }

    let zones: NonspeechZones = match &args.nonspeech {
        Some(p) => serde_json::from_str(&read_text(p)?)
            .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?,
        None => NonspeechZones::new(),
    };

    let provider: Box<dyn EndpointProvider> = match (&args.predictions, args.remote) {
        (Some(p), _) => Box::new(FileProvider::load(p)?),
        (None, true) => Box::new(RemoteProvider::new(&cfg.endpoint.clone().with_env())?),
        (None, false) => return Err(CliError::input("one of --predictions or --remote is required")),
    };
    let opts = CorpusOptions {
        fuzzy_threshold: cfg.fuzzy_threshold,
        tail_s: cfg.tail_s,
        split_ratio: cfg.split_ratio,
        master_seed: cfg.master_seed,
    };

    let run = || run_build(&sources, provider.as_ref(), &zones, &opts);
    let built = if args.remote {
        // Remote calls are bounded by the endpoint's in-flight limit.
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.endpoint.max_inflight.max(1))
            .build()
            .map_err(|e| CliError::input(format!("thread pool: {e}")))?
            .install(run)?
    } else {
        pool.install(run)?
    };

    write_text(&args.out, &manifest_to_string(&built.entries))?;
    if let Some(p) = &args.decisions {
        let lines: String = built
            .decisions
            .iter()
            .map(|d| serde_json::to_string(d).expect("decisions serialise") + "\n")
            .collect();
        write_text(p, &lines)?;
    }
    log::info!("wrote {} entries to {}", built.entries.len(), args.out.display());
    emit_json(&built.summary, None)
}

#[derive(Args, Debug)]
pub struct AugmentArgs {
    /// Input manifest; non-augmented Train entries are the sources.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory for WAVs and `manifest.jsonl`.
    #[arg(long)]
    out_dir: PathBuf,
    /// Number of augmented items.
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory of background-noise WAVs (synthetic noise when absent).
    #[arg(long)]
    noise_dir: Option<PathBuf>,
    /// Skip background noise entirely.
    #[arg(long)]
    no_background: bool,
}

#[derive(Serialize)]
struct AugmentSummary {
    sources: usize,
    generated: usize,
    covered_mic: usize,
    underwater: usize,
    clipped_samples: usize,
    manifest: String,
}

fn slice_entry(clip: &AudioClip, e: &ManifestEntry) -> CliResult<AudioClip> {
    let sr = f64::from(clip.sample_rate_hz());
    let start = (e.offset_s * sr).round().max(0.0) as usize;
    let end = ((e.offset_s + e.duration_s) * sr).round() as usize;
    if end > clip.len() || start >= end {
        return Err(CliError::semantic(format!("{}: span lies outside {}", e.chunk_id, e.audio_path)));
    }
    Ok(clip.slice(start, end))
}

pub fn augment(args: AugmentArgs, cfg: &mut ToolkitConfig, pool: &ThreadPool) -> CliResult<()> {
    cfg.master_seed = args.seed.unwrap_or(cfg.master_seed);
    if args.noise_dir.is_some() {
        cfg.noise_dir = args.noise_dir.clone();
    }
    cfg.validate()?;
    let seed = cfg.master_seed;

    let mut sources: Vec<ManifestEntry> = parse_manifest(&read_text(&args.manifest)?)?
        .into_iter()
        .filter(|e| !e.augmented && e.split == Split::Train)
        .collect();
    sources.sort_by(|a, b| a.chunk_id.cmp(&b.chunk_id));
    if sources.is_empty() && args.count > 0 {
        return Err(CliError::semantic("manifest has no non-augmented Train entries"));
    }

    let mut noise: BTreeMap<String, AudioClip> = BTreeMap::new();
    if let (Some(dir), false) = (&cfg.noise_dir, args.no_background) {
        for f in files_with_ext(dir, "wav")? {
            let name = f.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_owned();
            noise.insert(name, read_wav(&f)?);
        }
        if noise.is_empty() {
            return Err(CliError::input(format!("no .wav files in {}", dir.display())));
        }
    }
    let noise_names: Vec<String> = noise.keys().cloned().collect();

    // Item j draws its source with replacement from hash(seed, "aug-{j:06}").
    let plan: Vec<(usize, &ManifestEntry)> = (0..args.count)
        .map(|j| (j, &sources[(item_hash(seed, &format!("aug-{j:06}")) % sources.len() as u64) as usize]))
        .collect();
    let paths: BTreeSet<&str> = plan.iter().map(|(_, e)| e.audio_path.as_str()).collect();

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::input(format!("{}: {e}", args.out_dir.display())))?;
    let results: Vec<(ManifestEntry, usize)> = pool.install(|| -> CliResult<_> {
        let audio: BTreeMap<&str, AudioClip> = paths
            .par_iter()
            .map(|p| Ok((*p, read_wav(p)?)))
            .collect::<CliResult<_>>()?;
        plan.par_iter()
            .map(|&(j, src)| {
                let clip = slice_entry(&audio[src.audio_path.as_str()], src)?;
                let chunk_id = format!("{}.aug{j:06}", src.chunk_id);
                let mut recipe = sample_recipe_with(&cfg.augment, seed, &chunk_id, clip.duration_s());
                if !args.no_background {
                    recipe.background = Some(sample_background(seed, &chunk_id, cfg.snr_range(), &noise_names));
                }
                let noise_clip = match recipe.background.as_ref().map(|b| &b.source) {
                    Some(NoiseSource::File(name)) => noise.get(name),
                    _ => None,
                };
                let out = augment_chunk_with_noise(&clip, &recipe, noise_clip)?;
                let path = args.out_dir.join(format!("{chunk_id}.wav"));
                let report = write_wav(&path, &out, WavEncoding::Pcm16)?;
                let entry = ManifestEntry {
                    chunk_id,
                    audio_path: path.display().to_string(),
                    offset_s: 0.0,
                    duration_s: out.duration_s(),
                    transcript: src.transcript.clone(),
                    split: src.split,
                    augmented: true,
                    recipe: Some(recipe),
                    sample_rate_hz: out.sample_rate_hz(),
                };
                Ok((entry, report.clipped_samples))
            })
            .collect()
    })?;

    let covered_mic = results
        .iter()
        .filter(|(e, _)| matches!(e.recipe.as_ref().map(|r| &r.effect), Some(Effect::CoveredMic(_))))
        .count();
    let entries: Vec<ManifestEntry> = results.iter().map(|(e, _)| e.clone()).collect();
    let manifest = args.out_dir.join("manifest.jsonl");
    write_text(&manifest, &manifest_to_string(&entries))?;
    emit_json(
        &AugmentSummary {
            sources: sources.len(),
            generated: entries.len(),
            covered_mic,
            underwater: entries.len() - covered_mic,
            clipped_samples: results.iter().map(|(_, c)| c).sum(),
            manifest: manifest.display().to_string(),
        },
        None,
    )
}

#[derive(Args, Debug)]
pub struct ScoreWerArgs {
    /// Reference transcripts, one utterance per line.
    #[arg(long, requires = "hyp", conflicts_with = "pairs")]
    r#ref: Option<PathBuf>,
    /// Hypothesis transcripts, line-aligned with --ref.
    #[arg(long, requires = "ref")]
    hyp: Option<PathBuf>,
    /// JSONL with "ref" and "hyp" string fields per line (optional "id").
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Remove punctuation (including dandas) before tokenising.
    #[arg(long)]
    strip_punctuation: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PairReport {
    id: String,
    #[serde(flatten)]
    counts: EditCounts,
    wer_percent: Option<f64>,
}

#[derive(Serialize)]
struct WerOutput {
    strip_punctuation: bool,
    pooled: shobdosetu_core::metrics::CorpusWerReport,
    pairs: Vec<PairReport>,
}

#[derive(serde::Deserialize)]
struct PairLine {
    #[serde(default)]
    id: Option<String>,
    r#ref: String,
    hyp: String,
}

pub fn score_wer(args: ScoreWerArgs, cfg: &mut ToolkitConfig) -> CliResult<()> {
    let norm = TextNormalization { strip_punctuation: args.strip_punctuation || cfg.strip_punctuation };
    let pairs: Vec<(String, String, String)> = match (&args.r#ref, &args.hyp, &args.pairs) {
        (Some(r), Some(h), None) => {
            let (rt, ht) = (read_text(r)?, read_text(h)?);
            let (rl, hl): (Vec<&str>, Vec<&str>) = (rt.lines().collect(), ht.lines().collect());
            if rl.len() != hl.len() {
                return Err(CliError::input(format!(
                    "{} has {} lines but {} has {}",
                    r.display(),
                    rl.len(),
                    h.display(),
                    hl.len()
                )));
            }
            rl.into_iter()
                .zip(hl)
                .enumerate()
                .map(|(i, (a, b))| ((i + 1).to_string(), a.to_owned(), b.to_owned()))
                .collect()
        }
        (None, None, Some(p)) => read_text(p)?
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                let pl: PairLine = serde_json::from_str(l)
                    .map_err(|e| CliError::input(format!("{} line {}: {e}", p.display(), i + 1)))?;
                Ok((pl.id.unwrap_or_else(|| (i + 1).to_string()), pl.r#ref, pl.hyp))
            })
            .collect::<CliResult<_>>()?,
        _ => return Err(CliError::input("give --ref and --hyp, or --pairs")),
    };

    let pooled = corpus_wer(&pairs.iter().map(|(_, r, h)| (r, h)).collect::<Vec<_>>(), norm)?;
    let per_pair = pairs
        .iter()
        .map(|(id, r, h)| {
            let a = align_tokens(&tokenize_with(r, norm), &tokenize_with(h, norm));
            PairReport { id: id.clone(), wer_percent: a.counts.wer_percent(), counts: a.counts }
        })
        .collect();
    emit_json(&WerOutput { strip_punctuation: norm.strip_punctuation, pooled, pairs: per_pair }, args.out.as_deref())
}

#[derive(Args, Debug)]
pub struct ScoreDerArgs {
    /// Reference RTTM file or directory.
    #[arg(long)]
    r#ref: PathBuf,
    /// Hypothesis RTTM file or directory.
    #[arg(long)]
    hyp: PathBuf,
    /// Seconds excluded around every reference boundary.
    #[arg(long)]
    collar: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct DerSummary {
    false_alarm_s: f64,
    missed_s: f64,
    confusion_s: f64,
    total_s: f64,
    der: Option<f64>,
}

impl From<DerComponents> for DerSummary {
    fn from(c: DerComponents) -> Self {
        DerSummary {
            false_alarm_s: c.false_alarm_ms as f64 / 1000.0,
            missed_s: c.missed_ms as f64 / 1000.0,
            confusion_s: c.confusion_ms as f64 / 1000.0,
            total_s: c.total_ms as f64 / 1000.0,
            der: c.der(),
        }
    }
}

#[derive(Serialize)]
struct RecordingDer {
    uri: String,
    #[serde(flatten)]
    summary: DerSummary,
    mapping: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct DerOutput {
    collar_s: f64,
    pooled: DerSummary,
    recordings: Vec<RecordingDer>,
}

fn paired(path_ref: &Path, path_hyp: &Path) -> CliResult<(Vec<Annotation>, Vec<Annotation>)> {
    let refs = load_rttm(path_ref)?;
    let hyps = load_rttm(path_hyp)?;
    if let Some(uri) = refs.keys().find(|u| !hyps.contains_key(*u)).or_else(|| hyps.keys().find(|u| !refs.contains_key(*u))) {
        return Err(CliError::input(format!("recording {uri:?} is not present in both reference and hypothesis")));
    }
    let canon = |m: BTreeMap<String, Annotation>| m.into_values().map(|a| a.canonicalize()).collect::<Vec<_>>();
    Ok((canon(refs), canon(hyps)))
}

pub fn score_der(args: ScoreDerArgs, cfg: &mut ToolkitConfig, pool: &ThreadPool) -> CliResult<()> {
    cfg.collar_s = args.collar.unwrap_or(cfg.collar_s);
    cfg.validate()?;
    let (refs, hyps) = paired(&args.r#ref, &args.hyp)?;
    let collar = cfg.collar_s;
    let per: Vec<(String, DerComponents, BTreeMap<String, String>)> = pool.install(|| {
        refs.par_iter()
            .zip(&hyps)
            .map(|(r, h)| {
                let (c, m) = der_components(r, h, collar);
                (r.uri.clone(), c, m)
            })
            .collect()
    });
    let pooled: DerComponents = per.iter().map(|(_, c, _)| *c).sum();
    if pooled.der().is_none() {
        return Err(CliError::semantic("reference contains no scored speech"));
    }
    let recordings = per
        .into_iter()
        .map(|(uri, c, mapping)| RecordingDer { uri, summary: c.into(), mapping })
        .collect();
    emit_json(&DerOutput { collar_s: collar, pooled: pooled.into(), recordings }, args.out.as_deref())
}

#[derive(Args, Debug)]
pub struct PostArgs {
    /// Hypothesis RTTM file or directory.
    #[arg(long)]
    hyp: PathBuf,
    /// Output RTTM file.
    #[arg(long)]
    out: PathBuf,
    /// Bridge same-speaker gaps shorter than this (seconds).
    #[arg(long)]
    min_duration_off: Option<f64>,
    /// Round boundaries to multiples of this (seconds, 0 = off).
    #[arg(long)]
    round_granularity: Option<f64>,
    /// Drop segments shorter than this after merging (seconds).
    #[arg(long)]
    min_segment: Option<f64>,
}

pub fn post(args: PostArgs, cfg: &mut ToolkitConfig) -> CliResult<()> {
    let p = &mut cfg.post;
    p.min_duration_off_s = args.min_duration_off.unwrap_or(p.min_duration_off_s);
    p.round_granularity_s = args.round_granularity.unwrap_or(p.round_granularity_s);
    p.min_segment_s = args.min_segment.unwrap_or(p.min_segment_s);
    cfg.validate()?;
    let out: Vec<Annotation> = load_rttm(&args.hyp)?.values().map(|a| apply_post(a, &cfg.post)).collect();
    write_text(&args.out, &write_rttm(&out))
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Hypothesis RTTM file or directory.
    #[arg(long)]
    hyp: PathBuf,
    /// Reference RTTM file or directory.
    #[arg(long)]
    r#ref: PathBuf,
    #[arg(long)]
    collar: Option<f64>,
    /// Write the JSON result here (the table then goes to standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn grid_search(args: GridArgs, cfg: &mut ToolkitConfig, pool: &ThreadPool) -> CliResult<()> {
    cfg.collar_s = args.collar.unwrap_or(cfg.collar_s);
    cfg.validate()?;
    if cfg.grid.dimensions.is_empty() {
        return Err(CliError::input("the config has no \"grid\" dimensions"));
    }
    let (refs, hyps) = paired(&args.r#ref, &args.hyp)?;
    let result = pool.install(|| run_grid(&cfg.grid, &hyps, &refs, cfg.collar_s))?;
    let table = result.render_table();
    match &args.out {
        Some(p) => {
            emit_json(&result, Some(p))?;
            print!("{table}");
        }
        None => {
            eprint!("{table}");
            emit_json(&result, None)?;
        }
    }
    Ok(())
}
