use proptest::prelude::*;
use shobdosetu_core::audio::{read_wav, write_wav, AudioClip, WavEncoding};
use shobdosetu_core::augment::{augment_chunk, sample_recipe};
use shobdosetu_core::corpus::{manifest_to_string, parse_manifest, ManifestEntry, Split};
use shobdosetu_core::metrics::{der, parse_rttm, write_rttm, Annotation, SpeakerSegment};

#[test]
fn augmented_clip_survives_pcm16_file() {
    let dir = tempfile::tempdir().unwrap();
    let sr = 16_000;
    let samples = (0..sr as usize * 7).map(|i| (i as f64 * 0.013).sin() * 0.4).collect();
    let clip = AudioClip::new(samples, sr).unwrap();
    let recipe = sample_recipe(5, "item", clip.duration_s());
    let out = augment_chunk(&clip, &recipe).unwrap();
    let path = dir.path().join("a.wav");
    let report = write_wav(&path, &out, WavEncoding::Pcm16).unwrap();
    assert_eq!(report.clipped_samples, 0);
    let back = read_wav(&path).unwrap();
    assert_eq!(back.len(), out.len());
    let worst = out.samples().iter().zip(back.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst <= 0.5 / 32768.0 + 1e-12, "{worst}");
}

#[test]
fn manifest_with_recipe_round_trips() {
    let entries = vec![ManifestEntry {
        chunk_id: "ep_00001.aug000000".into(),
        audio_path: "aug/ep_00001.aug000000.wav".into(),
        offset_s: 0.0,
        duration_s: 6.25,
        transcript: Some("আমি বাজারে যাব".into()),
        split: Split::Train,
        augmented: true,
        recipe: Some(sample_recipe(1, "ep_00001.aug000000", 6.25)),
        sample_rate_hz: 16_000,
    }];
    let text = manifest_to_string(&entries);
    assert_eq!(parse_manifest(&text).unwrap(), entries);
    assert_eq!(manifest_to_string(&parse_manifest(&text).unwrap()), text);
}

fn annotation() -> impl Strategy<Value = Annotation> {
    prop::collection::vec((0i64..30_000, 1i64..5_000, 0usize..4), 1..10).prop_map(|v| {
        let segs = v.into_iter().map(|(s, d, k)| SpeakerSegment::new(s, s + d, format!("spk{k}"))).collect();
        Annotation::new("rec", segs)
    })
}

proptest! {
    #[test]
    fn rttm_round_trip_keeps_der(r in annotation(), h in annotation()) {
        let r2 = parse_rttm(&write_rttm(&[r.clone()])).unwrap().remove(0);
        let h2 = parse_rttm(&write_rttm(&[h.clone()])).unwrap().remove(0);
        prop_assert_eq!(r2.canonicalize(), r.canonicalize());
        prop_assert_eq!(der(&r, &h, 0.0).unwrap().der, der(&r2, &h2, 0.0).unwrap().der);
    }

    #[test]
    fn self_der_is_zero(r in annotation()) {
        prop_assert_eq!(der(&r, &r, 0.25).map(|d| d.der).unwrap_or(0.0), 0.0);
    }
}
