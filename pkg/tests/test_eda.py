import json

import numpy as np
import pytest

from braideda import (
    EdaConfig,
    FitnessSpec,
    FunctionMode,
    ModelType,
    SamplingMode,
    Variant,
    evaluate,
    greedy_search,
    random_search,
    run_eda,
    truncation_select,
)
from braideda.boltzmann import landscape_fitness
from braideda.fitness import Recoding


def tiny_config(**kw):
    base = dict(n=6, population=60, generations=8, seed=42)
    base.update(kw)
    return EdaConfig(**base)


class TestConfig:
    def test_plain_defaults(self):
        c = EdaConfig(n=50)
        assert c.resolved_population() == 10000
        assert c.resolved_generations() == 750

    def test_hybrid_defaults(self):
        c = EdaConfig(n=50, use_local=True)
        assert c.resolved_population() == 5000
        assert c.resolved_generations() == 100

    def test_overrides_win(self):
        c = EdaConfig(n=50, population=123, generations=7)
        assert c.resolved_population() == 123
        assert c.resolved_generations() == 7

    def test_fitness_spec_mapping(self):
        assert tiny_config().fitness_spec() == FitnessSpec(Variant.PLAIN_F, 0.0)
        c = tiny_config(function_mode=FunctionMode.FBAR_RECODE_II, lam=0.05)
        spec = c.fitness_spec()
        assert spec.variant is Variant.PREFIX_BEST_F_BAR
        assert spec.recoding is Recoding.TYPE_II
        assert spec.lam == 0.05

    def test_validate(self):
        with pytest.raises(ValueError):
            EdaConfig(n=0).validate()
        with pytest.raises(ValueError):
            EdaConfig(n=5, population=10, truncation=0.0).validate()
        tiny_config().validate()


class TestTruncationSelect:
    def test_count_is_ceiling(self):
        fit = np.linspace(0, 1, 10)
        assert len(truncation_select(fit, 0.05)) == 1
        assert len(truncation_select(fit, 0.25)) == 3  # ceil(2.5)

    def test_picks_best(self):
        fit = np.array([0.1, 0.9, 0.5, 0.7])
        assert truncation_select(fit, 0.5).tolist() == [1, 3]

    def test_stable_on_ties(self):
        fit = np.array([0.5, 0.9, 0.5, 0.9, 0.1])
        assert truncation_select(fit, 0.8).tolist() == [1, 3, 0, 2]


class TestRunEda:
    def test_bit_determinism(self, gs):
        a = run_eda(tiny_config(), gs)
        b = run_eda(tiny_config(), gs)
        assert a.deterministic_dict() == b.deterministic_dict()
        assert a.best_word == b.best_word

    def test_different_seeds_diverge(self, gs):
        a = run_eda(tiny_config(seed=1), gs)
        b = run_eda(tiny_config(seed=2), gs)
        assert a.deterministic_dict() != b.deterministic_dict()

    def test_incumbent_monotone(self, gs):
        rec = run_eda(tiny_config(generations=12), gs)
        inc = [s.incumbent_fitness for s in rec.stats]
        assert all(b >= a for a, b in zip(inc, inc[1:]))
        assert rec.best_evaluation.fitness == pytest.approx(inc[-1])

    def test_best_word_consistent(self, gs):
        rec = run_eda(tiny_config(), gs)
        ref = evaluate(gs, tiny_config().fitness_spec(), rec.best_word)
        assert rec.best_evaluation.fitness == pytest.approx(ref.fitness, abs=1e-12)

    def test_plain_eval_accounting(self, gs):
        c = tiny_config(population=40, generations=5)
        rec = run_eda(c, gs)
        assert rec.total_evaluations == 40 * 5
        assert rec.stats[-1].evaluations == rec.total_evaluations
        assert not rec.truncated

    def test_hybrid_eval_accounting(self, gs):
        c = tiny_config(use_local=True, population=20, generations=3)
        rec = run_eda(c, gs)
        # each generation: N evaluations plus greedy neighbor evaluations,
        # which come in multiples of 3n per row round
        extra = rec.total_evaluations - 20 * 3
        assert extra > 0 and extra % (3 * 6) == 0

    def test_budget_truncation(self, gs):
        c = tiny_config(population=50, generations=100, max_evaluations=120)
        rec = run_eda(c, gs)
        assert rec.truncated
        assert len(rec.stats) == 3  # stops after crossing the cap
        assert rec.total_evaluations == 150

    @pytest.mark.parametrize("mode", list(SamplingMode))
    @pytest.mark.parametrize("model", list(ModelType))
    def test_all_mode_model_pairs_run(self, gs, mode, model):
        c = tiny_config(sampling_mode=mode, model_type=model, generations=4)
        rec = run_eda(c, gs)
        assert rec.best_evaluation.fitness > 0

    @pytest.mark.parametrize("fn", list(FunctionMode))
    def test_all_function_modes_run(self, gs, fn):
        c = tiny_config(function_mode=fn, lam=0.01, generations=4)
        rec = run_eda(c, gs)
        assert rec.best_evaluation.fitness > 0

    def test_finds_global_optimum_n4(self, gs):
        # brute force over all 256 words as the oracle
        c = EdaConfig(n=4, population=300, generations=12, seed=7,
                      function_mode=FunctionMode.FBAR_NORECODE, lam=0.01)
        optimum = landscape_fitness(gs, c.fitness_spec(), 4).max()
        rec = run_eda(c, gs)
        assert rec.best_evaluation.fitness == pytest.approx(float(optimum), abs=1e-10)

    def test_hybrid_beats_random_init(self, gs):
        hybrid = run_eda(tiny_config(use_local=True, generations=3), gs)
        plain = run_eda(tiny_config(generations=3), gs)
        # greedy polishing makes the very first generation strictly stronger
        assert hybrid.stats[0].best_fitness > plain.stats[0].best_fitness

    def test_jsonl_serialisation(self, gs):
        rec = run_eda(tiny_config(generations=3), gs)
        lines = rec.to_jsonl().strip().split("\n")
        assert len(lines) == 1 + 3 + 1  # config, per-generation, final
        docs = [json.loads(line) for line in lines]
        assert docs[0]["config"]["n"] == 6
        assert docs[-1]["best_fitness"] == pytest.approx(rec.best_evaluation.fitness)
        assert "best_word_text" in docs[-1]


class TestBaselines:
    def test_random_search_matches_manual_argmax(self, gs):
        spec = FitnessSpec(Variant.PLAIN_F, 0.01)
        word, ev = random_search(gs, spec, 8, 500, np.random.default_rng(3))
        pop = np.random.default_rng(3).integers(0, 4, size=(500, 8), dtype=np.int8)
        fits = [evaluate(gs, spec, tuple(int(s) for s in row)).fitness for row in pop]
        assert ev.fitness == pytest.approx(max(fits), abs=1e-12)

    def test_greedy_result_is_local_optimum(self, gs):
        spec = FitnessSpec(Variant.PREFIX_BEST_F_BAR, 0.01)
        word, ev = greedy_search(gs, spec, 7, 10, np.random.default_rng(4))
        for pos in range(7):
            for sym in range(4):
                if sym == word[pos]:
                    continue
                cand = word[:pos] + (sym,) + word[pos + 1:]
                assert evaluate(gs, spec, cand).fitness <= ev.fitness + 1e-12

    def test_greedy_beats_its_own_starts(self, gs):
        spec = FitnessSpec(Variant.PLAIN_F, 0.0)
        _, gev = greedy_search(gs, spec, 10, 50, np.random.default_rng(5))
        _, rev = random_search(gs, spec, 10, 50, np.random.default_rng(5))
        assert gev.fitness >= rev.fitness - 1e-12

    def test_seeded_reproducibility(self, gs):
        spec = FitnessSpec(Variant.PLAIN_F, 0.0)
        a = random_search(gs, spec, 6, 100, np.random.default_rng(6))
        b = random_search(gs, spec, 6, 100, np.random.default_rng(6))
        assert a[0] == b[0]

    def test_input_validation(self, gs):
        spec = FitnessSpec(Variant.PLAIN_F, 0.0)
        with pytest.raises(ValueError):
            random_search(gs, spec, 5, 0, np.random.default_rng(0))
        with pytest.raises(ValueError):
            greedy_search(gs, spec, 5, 0, np.random.default_rng(0))
