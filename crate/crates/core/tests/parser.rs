use std::fs;
use std::path::{Path, PathBuf};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spdc_core::config::parse_scenario;
use spdc_core::Error;

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scn"))
        .collect();
    files.sort();
    files
}

/// Compare with the stored golden file, or write it when SPDC_BLESS is set.
fn golden(path: &Path, actual: &str) {
    if std::env::var_os("SPDC_BLESS").is_some() {
        fs::write(path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "{}", path.display());
}

fn error_class(e: &Error) -> &'static str {
    match e {
        Error::Syntax { .. } => "syntax",
        Error::Semantic { .. } => "semantic",
        Error::InvalidParameter { .. } => "parameter",
        _ => "other",
    }
}

#[test]
fn golden_corpus() {
    let files = corpus();
    assert!(files.len() >= 12);
    let mut classes = std::collections::BTreeSet::new();
    for file in files {
        let text = fs::read_to_string(&file).unwrap();
        let name = file.file_stem().unwrap().to_string_lossy().into_owned();
        match parse_scenario(&text) {
            Ok(s) => {
                assert!(name.starts_with("valid_"), "{name} should fail");
                let canonical = s.to_canonical_text();
                golden(&file.with_extension("canon"), &canonical);
                let again = parse_scenario(&canonical).unwrap();
                assert_eq!(again, s, "{name}");
                assert_eq!(again.to_canonical_text(), canonical, "{name}");
            }
            Err(e) => {
                assert!(name.starts_with("error_"), "{name} should parse: {e}");
                classes.insert(error_class(&e));
                golden(&file.with_extension("err"), &format!("{e}\n"));
            }
        }
    }
    assert!(classes.contains("syntax") && classes.contains("semantic"), "{classes:?}");
}

const TOKENS: &[&str] = &[
    "[device]", "[pulse]", "[beam]", "[grid]", "[", "]", "=", "#", "\"", "inf", "nan", "-", "+", ".", "e", "1e400", "0",
    "waist_um", "tilt_arcmin", "length_mm", "\n", " ", "\t", "é", "∞", "tau_points = 17", "position_mm = 99",
];

fn mutate(rng: &mut ChaCha8Rng, base: &str) -> String {
    let mut s: Vec<char> = base.chars().collect();
    for _ in 0..rng.gen_range(1..6) {
        let len = s.len().max(1);
        match rng.gen_range(0..6) {
            0 if !s.is_empty() => {
                let i = rng.gen_range(0..s.len());
                s.remove(i);
            }
            1 => {
                let i = rng.gen_range(0..=s.len());
                let c = char::from_u32(rng.gen_range(0..0x3000)).unwrap_or('?');
                s.insert(i, c);
            }
            2 => {
                let i = rng.gen_range(0..=s.len());
                let t = TOKENS[rng.gen_range(0..TOKENS.len())];
                for (k, c) in t.chars().enumerate() {
                    s.insert(i + k, c);
                }
            }
            3 if !s.is_empty() => {
                let i = rng.gen_range(0..s.len());
                s[i] = char::from(rng.gen_range(32u8..127));
            }
            4 => {
                // duplicate a line
                let text: String = s.iter().collect();
                let lines: Vec<&str> = text.lines().collect();
                if !lines.is_empty() {
                    let k = rng.gen_range(0..lines.len());
                    let mut out: Vec<&str> = lines.clone();
                    out.insert(rng.gen_range(0..=lines.len()), lines[k]);
                    s = out.join("\n").chars().collect();
                }
            }
            _ => {
                let a = rng.gen_range(0..len);
                let b = rng.gen_range(0..len);
                if a < s.len() && b < s.len() {
                    s.swap(a, b);
                }
            }
        }
    }
    s.into_iter().collect()
}

#[test]
fn fuzzed_inputs_never_panic() {
    let bases: Vec<String> = corpus().iter().map(|p| fs::read_to_string(p).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut accepted = 0;
    for _ in 0..10_000 {
        let base = &bases[rng.gen_range(0..bases.len())];
        let input = mutate(&mut rng, base);
        if let Ok(s) = parse_scenario(&input) {
            accepted += 1;
            let canonical = s.to_canonical_text();
            assert_eq!(parse_scenario(&canonical).unwrap().to_canonical_text(), canonical);
        }
    }
    assert!(accepted > 0);
}

proptest! {
    #[test]
    fn generated_scenarios_round_trip(
        length in 0.1f64..20.0,
        theta in -100.0f64..100.0,
        vg in 1e7f64..2.9e8,
        wavelength in 300.0f64..2000.0,
        duration in 0.05f64..50.0,
        beams in prop::collection::vec((-5.0f64..5.0, -150.0f64..150.0, 10.0f64..500.0, 0.01f64..10.0, -3.0f64..3.0), 1..5),
    ) {
        let mut text = format!("[device]\nlength_mm = {length}\nvg_m_per_s = {vg}\ntheta_deg_arcmin = {theta}\n[pulse]\nwavelength_nm = {wavelength}\nduration_ps = {duration}\n");
        for (z, t, w, a, p) in &beams {
            text.push_str(&format!("[beam]\nposition_mm = {z}\ntilt_arcmin = {t}\nwaist_um = {w}\namplitude = {a}\nphase_rad = {p}\n"));
        }
        let s = parse_scenario(&text).unwrap();
        prop_assert!((s.device.length - length / 1e3).abs() <= 1e-15 * length);
        let canonical = s.to_canonical_text();
        let again = parse_scenario(&canonical).unwrap();
        prop_assert_eq!(&again, &s);
        prop_assert_eq!(again.to_canonical_text(), canonical);
    }
}
