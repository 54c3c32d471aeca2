//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sonoskill::features::{
    angular_velocity, cooccurrence_counts, extract_features, features_of_pixels, histogram_stats,
    log_dimensionless_jerk, quantize_pixels, sparc, texture_features, Glcm, GlcmConfig, SparcConfig,
    DEFAULT_OFFSETS,
};
use sonoskill::fusion::{fuse_streams, slerp, FusedSample, ResampleConfig};
use sonoskill::ingest::read_session;
use sonoskill::skill::{build_report, calibrate_thresholds, classify, SkillLabel, SkillReport};
use sonoskill::synth::{gen_session, generate_session, with_idle_tail, ProfileConfig, ProfileKind};
use sonoskill::{Frame, PoseSample, Quaternion, Role, Session, SessionMeta};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if q.norm() > 0.1 {
            return q.normalize().unwrap();
        }
    }
}

// 1 -------------------------------------------------------------------------

fn report_for(kind: ProfileKind, seed: u64) -> std::result::Result<SkillReport, String> {
    let p = ProfileConfig::for_kind(kind, seed).with_geometry(320, 240);
    let s = generate_session(&p).map_err(|e| e.to_string())?;
    build_report(&s, &ResampleConfig::default(), &GlcmConfig::default()).map_err(|e| e.to_string())
}

fn separation() -> Outcome {
    let started = Instant::now();
    let reports = |kind, seeds: std::ops::Range<u64>| -> std::result::Result<Vec<SkillReport>, String> {
        seeds.map(|s| report_for(kind, s)).collect()
    };
    let cal_e = reports(ProfileKind::Expert, 100..110)?;
    let cal_n = reports(ProfileKind::Novice, 100..110)?;
    let th = calibrate_thresholds(&cal_e, &cal_n).map_err(|e| e.to_string())?;
    let exp = reports(ProfileKind::Expert, 0..10)?;
    let nov = reports(ProfileKind::Novice, 0..10)?;
    let elapsed = started.elapsed();

    for r in &exp {
        ensure((1600..=2500).contains(&r.n_samples), || {
            format!("{} n_samples {}", r.session_id, r.n_samples)
        })?;
        ensure(classify(r, &th) == SkillLabel::ExpertLike, || {
            format!("{} classified {}", r.session_id, classify(r, &th))
        })?;
    }
    for r in &nov {
        ensure((5000..=10000).contains(&r.n_samples), || {
            format!("{} n_samples {}", r.session_id, r.n_samples)
        })?;
        ensure(classify(r, &th) == SkillLabel::NoviceLike, || {
            format!("{} classified {}", r.session_id, classify(r, &th))
        })?;
    }
    let mut min_gap = f64::INFINITY;
    for e in &exp {
        for n in &nov {
            let (Some(se), Some(sn)) = (e.sparc, n.sparc) else {
                return Err(format!("missing SPARC in {} or {}", e.session_id, n.session_id));
            };
            ensure(se > sn, || format!("SPARC {} {se} <= {} {sn}", e.session_id, n.session_id))?;
            min_gap = min_gap.min(se - sn);
        }
    }
    ensure(elapsed <= Duration::from_secs(120), || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "thresholds n<={} sparc>={:.3}; min SPARC gap {:.3}; {:.1?}",
        th.max_expert_samples, th.min_expert_sparc, min_gap, elapsed
    ))
}

// 2 -------------------------------------------------------------------------

fn naive_counts(px: &[u8], w: usize, h: usize, levels: usize, (dx, dy): (i32, i32), symmetric: bool) -> Vec<u64> {
    let q = |x: usize, y: usize| (px[y * w + x] as usize * levels) / 256;
    let mut c = vec![0u64; levels * levels];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let (nx, ny) = (x + dx as i64, y + dy as i64);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            for i in 0..levels {
                for j in 0..levels {
                    if q(x as usize, y as usize) == i && q(nx as usize, ny as usize) == j {
                        c[i * levels + j] += 1;
                        if symmetric {
                            c[j * levels + i] += 1;
                        }
                    }
                }
            }
        }
    }
    c
}

fn naive_features(c: &[u64], levels: usize) -> [f64; 3] {
    let total: u64 = c.iter().sum();
    let (mut asm, mut hom) = (0.0, 0.0);
    for i in 0..levels {
        for j in 0..levels {
            let p = c[i * levels + j] as f64 / total as f64;
            asm += p * p;
            hom += p / (1.0 + ((i as f64) - (j as f64)).powi(2));
        }
    }
    [asm, asm.sqrt(), hom]
}

fn glcm_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (w, h, levels) = (16usize, 16usize, 8usize);
    let mut worst = 0f64;
    for case in 0..100 {
        let px: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
        let img = quantize_pixels(&px, w as u32, h as u32, levels as u32, None).map_err(|e| e.to_string())?;
        for symmetric in [true, false] {
            for off in DEFAULT_OFFSETS {
                let got = cooccurrence_counts(&img, off, symmetric).map_err(|e| e.to_string())?;
                let want = naive_counts(&px, w, h, levels, off, symmetric);
                ensure(got.counts == want, || format!("case {case} {off:?} sym={symmetric}: counts differ"))?;
                let f = texture_features(&got.normalize()).map_err(|e| e.to_string())?;
                let o = naive_features(&want, levels);
                for (a, b) in [f.asm, f.energy, f.homogeneity].iter().zip(o) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-12, || format!("feature error {worst:e}"))?;
    Ok(format!("1600 matrices exact; max feature error {worst:.1e}"))
}

// 3 -------------------------------------------------------------------------

fn degenerate_textures() -> Outcome {
    for value in [0u8, 77, 255] {
        let f = features_of_pixels(&[value; 64 * 48], 64, 48, &GlcmConfig::default()).map_err(|e| e.to_string())?;
        let t = f.texture;
        ensure(t.asm == 1.0 && t.energy == 1.0 && t.homogeneity == 1.0, || {
            format!("constant {value}: {t:?}")
        })?;
        ensure(f.histogram.entropy == 0.0, || format!("entropy {}", f.histogram.entropy))?;
        let row = [value; 5];
        ensure(histogram_stats(std::iter::once(&row[..])).entropy == 0.0, || "row entropy".into())?;
    }
    let mut worst = 0f64;
    for levels in [8usize, 16, 32, 64] {
        let n = levels * levels;
        let p = Glcm {
            levels,
            p: vec![1.0 / n as f64; n],
        };
        let t = texture_features(&p).map_err(|e| e.to_string())?;
        worst = worst.max((t.energy - 1.0 / levels as f64).abs());
    }
    ensure(worst <= 1e-12, || format!("uniform energy error {worst:e}"))?;
    Ok(format!("constant frames exact; uniform energy error {worst:.1e}"))
}

// 4 -------------------------------------------------------------------------

fn slerp_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0f64; 3];
    for i in 0..1000 {
        let a = random_unit(&mut rng);
        let mut b = random_unit(&mut rng);
        if a.dot(&b) < 0.0 {
            b = -b;
        }
        let g = random_unit(&mut rng);
        ensure(slerp(&a, &b, 0.0).unwrap() == a && slerp(&a, &b, 1.0).unwrap() == b, || {
            format!("pair {i}: endpoints")
        })?;
        let total = a.geodesic_angle(&b);
        for k in 0..=10 {
            let u = k as f64 / 10.0;
            let m = slerp(&a, &b, u).map_err(|e| e.to_string())?;
            worst[0] = worst[0].max((m.norm() - 1.0).abs());
            worst[1] = worst[1].max((a.geodesic_angle(&m) - u * total).abs());
            let lhs = slerp(&(g * a), &(g * b), u).map_err(|e| e.to_string())?;
            worst[2] = worst[2].max(lhs.geodesic_angle(&(g * m)));
        }
    }
    ensure(worst.iter().all(|&e| e <= 1e-9), || format!("errors {worst:?}"))?;
    Ok(format!(
        "norm {:.1e}, linearity {:.1e}, left-invariance {:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

// 5 -------------------------------------------------------------------------

fn random_session(rng: &mut ChaCha8Rng) -> Session {
    let mut poses = Vec::new();
    let mut t = rng.gen_range(0..20_000u64);
    let mut q = random_unit(rng);
    for _ in 0..rng.gen_range(50..300) {
        poses.push(PoseSample::new(t, q));
        t += rng.gen_range(5_000..15_000);
        let step = [rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)];
        q = (q * Quaternion::from_rotation_vector(step)).normalize().unwrap();
    }
    let mut frames = Vec::new();
    let mut ft = rng.gen_range(0..60_000u64);
    while ft < t + 50_000 {
        frames.push(Frame::from_pixels(ft, 2, 2, vec![0; 4]).unwrap());
        ft += rng.gen_range(10_000..120_000);
    }
    let meta = SessionMeta {
        session_id: "random".into(),
        participant_role: Role::Unknown,
        trial: 1,
        pose_rate_hz: 100.0,
        frame_rate_hz: 25.0,
    };
    Session::new(meta, poses, frames)
}

fn brute_nearest(frames: &[Frame], t: u64, max_stale: u64) -> Option<usize> {
    let mut best: Option<(u64, usize)> = None;
    for (i, f) in frames.iter().enumerate() {
        let d = f.t.0.abs_diff(t);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    best.filter(|&(d, _)| d <= max_stale).map(|(_, i)| i)
}

fn resampler_grid() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0f64;
    let mut samples = 0usize;
    for case in 0..50 {
        let s = random_session(&mut rng);
        let dt = [2_500u64, 5_000, 10_000, 20_000][case % 4];
        let cfg = ResampleConfig {
            delta_t_us: dt,
            ..ResampleConfig::default()
        };
        let fused = fuse_streams(&s, &cfg).map_err(|e| format!("case {case}: {e}"))?;
        let origin = fused[0].t.0;
        for (k, f) in fused.iter().enumerate() {
            ensure(f.t.0 == origin + k as u64 * dt, || format!("case {case}: sample {k} off grid"))?;
            let want = brute_nearest(&s.frames, f.t.0, cfg.max_frame_staleness_us);
            ensure(f.frame.map(|m| m.idx) == want, || {
                format!("case {case} t={}: frame {:?} vs brute {:?}", f.t, f.frame, want)
            })?;
        }
        let coarse_cfg = ResampleConfig {
            delta_t_us: 2 * dt,
            ..cfg
        };
        let coarse = fuse_streams(&s, &coarse_cfg).map_err(|e| e.to_string())?;
        ensure(coarse.len() == fused.len().div_ceil(2), || format!("case {case}: coarse length"))?;
        for (k, c) in coarse.iter().enumerate() {
            let fine: &FusedSample = &fused[2 * k];
            ensure(c.t == fine.t, || format!("case {case}: coarse time"))?;
            worst = worst.max(c.q.geodesic_angle(&fine.q));
        }
        samples += fused.len();
    }
    ensure(worst <= 1e-9, || format!("refinement error {worst:e}"))?;
    Ok(format!("{samples} grid samples; refinement error {worst:.1e}"))
}

// 6 -------------------------------------------------------------------------

fn motion_invariances() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = [0f64; 4];
    for _ in 0..20 {
        let s = random_session(&mut rng);
        let poses: Vec<PoseSample> = s
            .poses
            .iter()
            .enumerate()
            .map(|(k, p)| PoseSample::new(k as u64 * 10_000, p.q))
            .collect();
        let base = angular_velocity(&poses, 10_000).map_err(|e| e.to_string())?;

        let g = random_unit(&mut rng);
        let moved: Vec<PoseSample> = poses.iter().map(|p| PoseSample::new(p.t.0, g * p.q)).collect();
        let left = angular_velocity(&moved, 10_000).map_err(|e| e.to_string())?;
        let n = poses.len();
        let reversed: Vec<PoseSample> = (0..n).map(|k| PoseSample::new(k as u64 * 10_000, poses[n - 1 - k].q)).collect();
        let rev = angular_velocity(&reversed, 10_000).map_err(|e| e.to_string())?;
        for k in 0..n - 1 {
            for c in 0..3 {
                worst[0] = worst[0].max((left.omega[k][c] - base.omega[k][c]).abs());
                worst[1] = worst[1].max((rev.omega[k][c] + base.omega[n - 2 - k][c]).abs());
            }
        }

        let cfg = SparcConfig::default();
        let s0 = sparc(&base.speed, 100.0, &cfg).map_err(|e| e.to_string())?;
        let l0 = log_dimensionless_jerk(&base.speed, 0.01).map_err(|e| e.to_string())?;
        for c in [0.5, 2.0, 10.0] {
            let scaled: Vec<f64> = base.speed.iter().map(|v| c * v).collect();
            worst[2] = worst[2].max((sparc(&scaled, 100.0, &cfg).unwrap() - s0).abs());
            worst[3] = worst[3].max((log_dimensionless_jerk(&scaled, 0.01).unwrap() - l0).abs());
        }
    }
    ensure(worst.iter().all(|&e| e <= 1e-9), || format!("errors {worst:?}"))?;

    let mut tail_gap = f64::INFINITY;
    for i in 0..20u64 {
        let kind = if i % 2 == 0 { ProfileKind::Expert } else { ProfileKind::Novice };
        let p = ProfileConfig::for_kind(kind, 600 + i).with_geometry(16, 16);
        let s = generate_session(&p).map_err(|e| e.to_string())?;
        let fuse = ResampleConfig::default();
        let glcm = GlcmConfig::default();
        let before = build_report(&s, &fuse, &glcm).map_err(|e| e.to_string())?;
        let after = build_report(&with_idle_tail(&s, 10.0), &fuse, &glcm).map_err(|e| e.to_string())?;
        let (Some(b), Some(a)) = (before.sparc, after.sparc) else {
            return Err(format!("{}: SPARC undefined", s.meta.session_id));
        };
        ensure(after.n_samples > before.n_samples, || format!("{}: n_samples", s.meta.session_id))?;
        ensure(a <= b, || format!("{}: idle tail raised SPARC {b} -> {a}", s.meta.session_id))?;
        tail_gap = tail_gap.min(b - a);
    }
    Ok(format!(
        "left {:.1e}, reversal {:.1e}, SPARC scale {:.1e}, LDLJ scale {:.1e}; idle tail min drop {:.2e}",
        worst[0], worst[1], worst[2], worst[3], tail_gap
    ))
}

// 7 -------------------------------------------------------------------------

fn throughput() -> Outcome {
    let mut p = ProfileConfig::expert(7);
    p.n_samples_range = (6001, 6001);
    let s = generate_session(&p).map_err(|e| e.to_string())?;
    let cfg = ResampleConfig::default();
    let started = Instant::now();
    let fused = fuse_streams(&s, &cfg).map_err(|e| e.to_string())?;
    let table = extract_features(&s, &fused, cfg.delta_t_us, &GlcmConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(s.frames.len() == 1501 && table.frames.len() == 1501, || {
        format!("{} frames, {} featurized", s.frames.len(), table.frames.len())
    })?;
    ensure(elapsed <= Duration::from_secs(60), || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "60 s session, {} grid samples, 1501 frames at 640x480 in {:.1?} ({:.1}x real time)",
        fused.len(),
        elapsed,
        60.0 / elapsed.as_secs_f64()
    ))
}

// 8 -------------------------------------------------------------------------

fn persistence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    for p in [ProfileConfig::expert(8), ProfileConfig::novice(8)] {
        let p = p.with_geometry(64, 48);
        let out = dir.path().join(format!("{:?}", p.kind));
        let mem = gen_session(&p, &out).map_err(|e| e.to_string())?;
        let disk = read_session(&out).map_err(|e| e.to_string())?;
        ensure(mem.meta == disk.meta, || "meta differs".into())?;
        ensure(mem.poses == disk.poses, || "poses differ".into())?;
        ensure(mem.frames.len() == disk.frames.len(), || "frame count differs".into())?;
        for (a, b) in mem.frames.iter().zip(&disk.frames) {
            ensure(a.t == b.t && a.width == b.width && a.height == b.height, || "frame header".into())?;
            ensure(a.load().unwrap() == b.load().unwrap(), || format!("pixels differ at {}", a.t))?;
        }
        let fuse = ResampleConfig::default();
        let glcm = GlcmConfig::default();
        let r_mem = build_report(&mem, &fuse, &glcm).map_err(|e| e.to_string())?;
        let r_disk = build_report(&disk, &fuse, &glcm).map_err(|e| e.to_string())?;
        let bits = |r: &SkillReport| serde_json::to_string(r).unwrap();
        ensure(r_mem == r_disk && bits(&r_mem) == bits(&r_disk), || {
            format!("{}: reports differ", mem.meta.session_id)
        })?;
        details.push(format!("{} ({} poses, {} frames)", mem.meta.session_id, mem.poses.len(), mem.frames.len()));
    }
    Ok(details.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("expert/novice separation", separation),
        ("GLCM oracle equivalence", glcm_oracle),
        ("texture degenerate cases", degenerate_textures),
        ("SLERP suite", slerp_suite),
        ("resampler grid properties", resampler_grid),
        ("motion-metric invariances", motion_invariances),
        ("real-time throughput", throughput),
        ("persistence round trip", persistence),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1)
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
