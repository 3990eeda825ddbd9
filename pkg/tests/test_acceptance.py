"""End-to-end acceptance checks for the memory-driven control stack.

Each test prints exactly one PASS/FAIL line with the measured figures
and the tolerance it was judged against (run pytest with -s to see the
lines on success). Budgeted tests also enforce a wall-clock limit so
the suite stays cheap enough to run on every change.
"""

import dataclasses
import json
import time

import numpy as np

from touchmem.config import default_config
from touchmem.memory import AssociationEncoder, MemoryBank
from touchmem.recording import Recording, RecordingWriter
from touchmem.rope3d import Rope3D
from touchmem.scenarios import (
    build_compliance_banks,
    build_sequence_bank,
    constant_touch,
    force_speed_curve,
    replay_max_error,
)
from touchmem.sim import derive_features, run_closed_loop
from touchmem.tactile import IzhikevichNeuron, IzhikevichParams, TactileFeature


def quiet_config():
    cfg = default_config()
    return dataclasses.replace(cfg, sim=dataclasses.replace(cfg.sim, noise_sigma=0.0))


def report(ok: bool, name: str, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


def test_rotation_invariants():
    # 1000 randomized (vector, axis, angle) cases across dims 3/30/120:
    # norm drift <= 1e-9, zero-angle identity <= 1e-15 elementwise,
    # relative-angle property <= 1e-9, all inside 5 s
    t0 = time.perf_counter()
    rng = np.random.default_rng(2026)
    ropes = {d: Rope3D(d) for d in (3, 30, 120)}
    worst_norm = worst_ident = worst_rel = 0.0
    for i in range(1000):
        rope = ropes[(3, 30, 120)[i % 3]]
        u = rng.standard_normal(rope.dim)
        w = rng.standard_normal(rope.dim)
        axis = rng.standard_normal(3)
        axis /= np.linalg.norm(axis)
        t1, t2 = rng.uniform(-2.0 * np.pi, 2.0 * np.pi, size=2)
        ru = rope.rotate(u, axis, t1)
        worst_norm = max(worst_norm, abs(np.linalg.norm(ru) - np.linalg.norm(u)))
        worst_ident = max(
            worst_ident, np.max(np.abs(rope.rotate(u, axis, 0.0) - u))
        )
        lhs = float(ru @ rope.rotate(w, axis, t2))
        rhs = float(u @ rope.rotate(w, axis, t2 - t1))
        worst_rel = max(worst_rel, abs(lhs - rhs))
    elapsed = time.perf_counter() - t0
    ok = worst_norm <= 1e-9 and worst_ident <= 1e-15 and worst_rel <= 1e-9
    ok = ok and elapsed < 5.0
    assert report(
        ok,
        "rotation invariants",
        f"norm drift {worst_norm:.2e} (<=1e-9), zero-angle {worst_ident:.2e} "
        f"(<=1e-15), relative angle {worst_rel:.2e} (<=1e-9), {elapsed:.2f}s (<5s)",
    )


def test_binding_preserves_similarity():
    # 1000 random bipolar triples of length 120: <a*c, b*c> == <a, b>
    # with integer exactness, inside 1 s
    t0 = time.perf_counter()
    rng = np.random.default_rng(31)
    mismatches = 0
    for _ in range(1000):
        a, b, c = (rng.integers(0, 2, 120) * 2.0 - 1.0 for _ in range(3))
        if float((a * c) @ (b * c)) != float(a @ b):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 1.0
    assert report(
        ok,
        "binding similarity",
        f"{mismatches}/1000 mismatches (integer exact), {elapsed:.2f}s (<1s)",
    )


def test_spike_count_monotone_in_drive():
    # spike count over 1 s is non-decreasing (with one spike of slack)
    # across drive currents 0..12; zero drive from rest stays silent;
    # inside 2 s
    t0 = time.perf_counter()
    neuron = IzhikevichNeuron(IzhikevichParams())
    counts = []
    for current in range(13):
        neuron.reset()
        counts.append(len(neuron.advance(float(current), 1.0)))
    elapsed = time.perf_counter() - t0
    monotone = all(b >= a - 1 for a, b in zip(counts, counts[1:]))
    ok = monotone and counts[0] == 0 and elapsed < 2.0
    assert report(
        ok,
        "spike count monotone",
        f"counts {counts} (non-decreasing within 1), zero drive -> "
        f"{counts[0]} spikes, {elapsed:.2f}s (<2s)",
    )


def test_sequence_replay_within_quantization():
    # train on one noiseless 40-step, 3-joint guided run; closed-loop
    # recall at beta=32 retraces every step within the per-joint
    # position resolution (range / 2^4); inside 10 s
    t0 = time.perf_counter()
    cfg = quiet_config()
    waypoints = [[-0.3, -0.5, 0.2], [0.1, -0.1, -0.2], [-0.1, 0.3, 0.4]]
    bank, rec = build_sequence_bank(cfg, "wrist_upper", waypoints, 20, 8.0)
    n_ticks = len(rec.states) - 1
    assert n_ticks == 40
    log = run_closed_loop(
        cfg,
        {"wrist_upper": bank},
        constant_touch("wrist_upper", 8.0, n_ticks),
        n_ticks,
        beta=32.0,
        start=rec.states[0][1],
    )
    errors = replay_max_error(rec, log)
    tolerance = cfg.build_codec().quantization_resolution()
    elapsed = time.perf_counter() - t0
    ok = bool(np.all(errors <= tolerance)) and elapsed < 10.0
    assert report(
        ok,
        "sequence replay",
        f"max per-joint error {np.array2string(errors, precision=3)} rad "
        f"(<= {np.array2string(tolerance, precision=3)}), {elapsed:.2f}s (<10s)",
    )


def test_recalled_speed_increases_with_force():
    # compliance banks trained from per-magnitude sweeps; at touch
    # magnitudes {2, 5, 10, 15} N the steady recalled speed is strictly
    # increasing with Spearman rho = 1.0, and the opposite patch drives
    # the joint the opposite way at every level; inside 30 s
    t0 = time.perf_counter()
    cfg = quiet_config()
    levels = [2.0, 5.0, 10.0, 15.0]
    banks = build_compliance_banks(
        cfg, ["wrist_upper", "wrist_under"], [2, 4, 6, 8, 10, 12, 14, 16], 0.1
    )
    beta = cfg.memory.beta_compliance
    up = force_speed_curve(cfg, banks, "wrist_upper", levels, beta)
    down = force_speed_curve(cfg, banks, "wrist_under", levels, beta)
    speeds = [up["speeds"][m] for m in levels]
    opposite = all(
        np.sign(down["speeds"][m]) == -np.sign(up["speeds"][m]) != 0 for m in levels
    )
    increasing = all(b > a for a, b in zip(speeds, speeds[1:]))
    elapsed = time.perf_counter() - t0
    ok = increasing and up["spearman"] == 1.0 and opposite and elapsed < 30.0
    assert report(
        ok,
        "force-speed compliance",
        f"speeds {[round(s, 4) for s in speeds]} rad/s strictly increasing, "
        f"spearman {up['spearman']}, opposite patch flips sign at all levels: "
        f"{opposite}, {elapsed:.2f}s (<30s)",
    )


def test_entropy_shrinks_as_beta_grows():
    # 100 fixed queries against a 200-column bank: recall weight entropy
    # is monotone non-increasing over beta in {0.1, 1, 4, 16, 64} and
    # the weights sum to 1 within 1e-12 everywhere
    cfg = default_config()
    encoder = AssociationEncoder.default(cfg.limits)
    axis = np.array([1.0, 0.0, 0.0])
    poses = np.linspace([-0.8, -0.9, -1.2], [0.8, 0.9, 1.2], 201)
    states = [(0.02 * k, poses[k]) for k in range(201)]
    features = [
        TactileFeature(0.02 * k, "wrist_upper", 2.1, 0.2 + 0.003 * k, axis, 1)
        for k in range(200)
    ]
    bank = MemoryBank.train(encoder, states, features)
    assert bank.size == 200

    rng = np.random.default_rng(7)
    lims = np.array(cfg.limits)
    betas = [0.1, 1.0, 4.0, 16.0, 64.0]
    worst_sum = 0.0
    violations = 0
    for _ in range(100):
        angles = rng.uniform(lims[:, 0], lims[:, 1])
        probe = TactileFeature(0.0, "wrist_upper", 2.1, rng.uniform(0.05, 0.95),
                               axis, 1)
        entropies = []
        for beta in betas:
            decision = bank.recall(angles, probe, beta)
            worst_sum = max(worst_sum, abs(float(decision.weights.sum()) - 1.0))
            entropies.append(decision.entropy)
        if any(b > a for a, b in zip(entropies, entropies[1:])):
            violations += 1
    ok = violations == 0 and worst_sum <= 1e-12
    assert report(
        ok,
        "recall temperature",
        f"{violations}/100 queries broke entropy monotonicity over betas "
        f"{betas}, worst |sum(w)-1| {worst_sum:.2e} (<=1e-12)",
    )


def test_two_patch_dispatch():
    # reach bank on one patch, grasp-retract bank on another; touching
    # A then B executes both stored sequences in order within the
    # replay tolerance, with zero motion while nothing is touched
    cfg = quiet_config()
    p0 = [-0.2, -0.4, 0.1]
    p1 = [0.2, 0.2, 0.1]
    p2 = [0.2, 0.2, -0.45]   # grasp: roll down
    p3 = [-0.2, -0.1, -0.45]  # retract: lift and flex back off
    reach_bank, reach_rec = build_sequence_bank(cfg, "wrist_upper", [p0, p1], 20, 8.0)
    grasp_bank, grasp_rec = build_sequence_bank(
        cfg, "wrist_left", [p1, p2, p3], 15, 8.0
    )
    n_a, gap, n_b = 20, 20, 30

    def touches(k):
        if k < n_a:
            return {"wrist_upper": 8.0}
        if k < n_a + gap:
            return {}
        return {"wrist_left": 8.0}

    banks = {"wrist_upper": reach_bank, "wrist_left": grasp_bank}
    log = run_closed_loop(cfg, banks, touches, n_a + gap + n_b, beta=32.0, start=p0)
    executed = log.angles()
    reach_states = np.array([a for _, a in reach_rec.states])
    grasp_states = np.array([a for _, a in grasp_rec.states])
    err_reach = np.max(np.abs(executed[: n_a + 1] - reach_states), axis=0)
    gap_rows = executed[n_a : n_a + gap + 1]
    gap_motion = float(np.max(np.abs(gap_rows - gap_rows[0])))
    err_grasp = np.max(np.abs(executed[n_a + gap :] - grasp_states), axis=0)
    tolerance = cfg.build_codec().quantization_resolution()
    ok = (
        bool(np.all(err_reach <= tolerance))
        and bool(np.all(err_grasp <= tolerance))
        and gap_motion == 0.0
    )
    assert report(
        ok,
        "two-patch dispatch",
        f"reach error {np.array2string(err_reach, precision=3)}, grasp error "
        f"{np.array2string(err_grasp, precision=3)} "
        f"(<= {np.array2string(tolerance, precision=3)}), untouched interval "
        f"motion {gap_motion} (== 0)",
    )


def test_format_round_trips(tmp_path):
    # bank save/load and recording write/read re-serialize byte for
    # byte and reproduce recall outputs bit for bit
    cfg = quiet_config()
    bank, rec = build_sequence_bank(
        cfg, "wrist_upper", [[0.0, -0.3, 0.0], [0.0, 0.3, 0.2]], 20, 8.0
    )

    bank_a = tmp_path / "bank_a.json"
    bank_b = tmp_path / "bank_b.json"
    bank.save(bank_a)
    loaded = MemoryBank.load(bank_a)
    loaded.save(bank_b)
    bank_bytes_equal = bank_a.read_bytes() == bank_b.read_bytes()

    rng = np.random.default_rng(19)
    lims = np.array(cfg.limits)
    axis = cfg.patch("wrist_upper").axis_array()
    recall_identical = True
    for _ in range(10):
        angles = rng.uniform(lims[:, 0], lims[:, 1])
        probe = TactileFeature(0.0, "wrist_upper", 2.1, rng.uniform(0.1, 0.9),
                               axis, 1)
        for beta in (2.0, 8.0, 32.0):
            d0 = bank.recall(angles, probe, beta)
            d1 = loaded.recall(angles, probe, beta)
            recall_identical = recall_identical and (
                np.array_equal(d0.weights, d1.weights)
                and np.array_equal(d0.target_angles, d1.target_angles)
                and np.array_equal(d0.displacement, d1.displacement)
                and d0.entropy == d1.entropy
                and d0.best_index == d1.best_index
            )

    rec_a = tmp_path / "rec_a.jsonl"
    rec_b = tmp_path / "rec_b.jsonl"
    with RecordingWriter(rec_a, rec.meta) as writer:
        for sample in rec.samples:
            writer.write_sample(sample)
    loaded_rec = Recording.load(rec_a)
    loaded_rec.save(rec_b)
    rec_bytes_equal = rec_a.read_bytes() == rec_b.read_bytes()

    encoder = cfg.build_association_encoder()
    retrained = MemoryBank.train(
        encoder, loaded_rec.states, derive_features(cfg, loaded_rec)["wrist_upper"]
    )
    bank_from_loaded_identical = np.array_equal(retrained.keys, bank.keys) and (
        np.array_equal(retrained.values, bank.values)
    )

    ok = (
        bank_bytes_equal
        and recall_identical
        and rec_bytes_equal
        and bank_from_loaded_identical
    )
    assert report(
        ok,
        "format round trips",
        f"bank bytes identical: {bank_bytes_equal}, recall bit-identical over "
        f"30 probes: {recall_identical}, recording bytes identical: "
        f"{rec_bytes_equal}, retrained bank identical: {bank_from_loaded_identical}",
    )
