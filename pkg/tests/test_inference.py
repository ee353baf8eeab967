import random

import pytest

from factoredsets import (
    FactoredSet,
    GroundSet,
    Model,
    OrthogonalityDatabase,
    Partition,
    SearchBounds,
    Truncation,
    ValidationError,
    before,
    history,
    infer_before,
    is_complete,
    is_consistent_up_to_bound,
    models_database,
    pullback,
    search_models,
    trivial_factorization,
)


def _two_bit_db(**kwargs):
    omega = GroundSet(4, ("00", "01", "10", "11"))
    named = {
        "X": Partition.from_blocks(omega, [[0, 1], [2, 3]]),
        "V": Partition.from_blocks(omega, [[0, 3], [1, 2]]),
        "Y": Partition.from_blocks(omega, [[0, 2], [1, 3]]),
    }
    return OrthogonalityDatabase(
        omega=omega,
        partitions=named,
        orthogonal_triples=kwargs.get("orthogonal", frozenset({("X", "V", "_")})),
        dependent_triples=kwargs.get("dependent", frozenset({("V", "V", "_")})),
    )


class TestDatabase:
    def test_unknown_names_rejected(self):
        omega = GroundSet(2)
        with pytest.raises(ValidationError, match="unknown partition name"):
            OrthogonalityDatabase(
                omega=omega,
                partitions={},
                orthogonal_triples=frozenset({("A", "A", "_")}),
                dependent_triples=frozenset(),
            )

    def test_specials_resolve(self):
        db = _two_bit_db()
        assert db.resolve("_") == Partition.indiscrete(db.omega)
        assert db.resolve("!") == Partition.discrete(db.omega)


class TestPullback:
    def test_identity_labeling(self, ex1):
        model = Model(ex1.fs, tuple(range(4)), ex1.fs.ground)
        assert pullback(model, ex1.X) == ex1.X

    def test_constant_labeling_collapses(self, ex1):
        fs = trivial_factorization(GroundSet(4))
        model = Model(fs, (2, 2, 2, 2), ex1.fs.ground)
        assert pullback(model, ex1.X) == Partition.indiscrete(fs.ground)

    def test_twelve_element_model_pullbacks(self, ex2):
        # The pullbacks of the observed partitions land exactly on the
        # model's factors, except the third bit which also separates the
        # short worlds by their copied bit.
        model = ex2.model
        mf = ex2.model_file
        assert pullback(model, ex2.db.resolve("X")) == mf.resolve("Xp")
        assert pullback(model, ex2.db.resolve("V")) == mf.resolve("Vp")
        labels = model.factored.ground.labels
        z_pull = pullback(model, ex2.db.resolve("Z"))
        expected_block = frozenset(
            i for i, lab in enumerate(labels) if lab[-1] == "0"
        )
        assert frozenset(z_pull.block_sets) == frozenset(
            {expected_block, frozenset(range(12)) - expected_block}
        )

    def test_twelve_element_model_histories(self, ex2):
        fs = ex2.model.factored
        mf = ex2.model_file
        jx = fs.factors.index(mf.resolve("Xp"))
        jv = fs.factors.index(mf.resolve("Vp"))
        jz = fs.factors.index(mf.resolve("Zp"))
        assert history(fs, pullback(ex2.model, ex2.db.resolve("X"))) == 1 << jx
        assert history(fs, pullback(ex2.model, ex2.db.resolve("V"))) == 1 << jv
        assert history(fs, pullback(ex2.model, ex2.db.resolve("Y"))) == (
            1 << jx | 1 << jv
        )
        assert history(fs, pullback(ex2.model, ex2.db.resolve("Z"))) == fs.full_mask
        for y_block in pullback(ex2.model, ex2.db.resolve("Y")).block_sets:
            for name, expected in (("X", 1 << jx | 1 << jv), ("V", 1 << jx | 1 << jv), ("Z", 1 << jz)):
                pulled = pullback(ex2.model, ex2.db.resolve(name))
                assert history(fs, pulled.restrict(y_block)) == expected


class TestModelsDatabase:
    def test_identity_model_of_the_two_bit_db(self, ex1):
        db = _two_bit_db()
        model = Model(ex1.fs, tuple(range(4)), db.omega)
        report = models_database(model, db)
        assert report.ok
        assert all(entry.ok for entry in report.entries)
        assert len(report.entries) == 2

    def test_trivial_factorization_fails(self, ex1):
        db = _two_bit_db()
        fs = trivial_factorization(GroundSet(4))
        report = models_database(Model(fs, tuple(range(4)), db.omega), db)
        assert not report.ok
        failing = [e for e in report.entries if not e.ok]
        assert failing and failing[0].names == ("X", "V", "_")

    def test_twelve_element_model(self, ex2):
        report = models_database(ex2.model, ex2.db)
        assert report.ok
        assert len(report.entries) == 6


class TestSearch:
    def test_yielded_models_all_pass(self, ex1):
        found = 0
        for item in search_models(ex1.db, SearchBounds(max_size=4)):
            assert not isinstance(item, Truncation)
            assert models_database(item, ex1.db).ok
            found += 1
        assert found > 0

    def test_contains_the_square_witness(self, ex1):
        sizes = set()
        for item in search_models(ex1.db, SearchBounds(max_size=4)):
            if item.factored.size == 4 and item.factored.dim == 2:
                x = pullback(item, ex1.db.resolve("X"))
                v = pullback(item, ex1.db.resolve("V"))
                hx, hv = history(item.factored, x), history(item.factored, v)
                if hx and hv and not hx & hv:
                    sizes.add(item.factored.size)
        assert 4 in sizes

    def test_deterministic_stream(self, ex1):
        first = [
            (m.factored.factors, m.labeling)
            for m in search_models(ex1.db, SearchBounds(max_size=3))
        ]
        second = [
            (m.factored.factors, m.labeling)
            for m in search_models(ex1.db, SearchBounds(max_size=3))
        ]
        assert first == second

    def test_self_dependent_indiscrete_is_unsatisfiable(self):
        db = _two_bit_db(
            orthogonal=frozenset(), dependent=frozenset({("_", "_", "_")})
        )
        assert list(search_models(db, SearchBounds(max_size=3))) == []

    def test_empty_database_on_a_point(self):
        omega = GroundSet(1)
        db = OrthogonalityDatabase(
            omega=omega,
            partitions={},
            orthogonal_triples=frozenset(),
            dependent_triples=frozenset(),
        )
        models = list(search_models(db, SearchBounds(max_size=1)))
        assert len(models) == 1
        assert models[0].factored.size == 1

    def test_max_dim_filter(self, ex1):
        for item in search_models(ex1.db, SearchBounds(max_size=4, max_dim=1)):
            assert item.factored.dim <= 1

    def test_surjective_only(self, ex1):
        all_markings = {
            m.labeling for m in search_models(ex1.db, SearchBounds(max_size=4))
        }
        surjective = list(
            search_models(ex1.db, SearchBounds(max_size=4, surjective_only=True))
        )
        for m in surjective:
            assert set(m.labeling) == set(range(4))
            assert m.labeling in all_markings

    def test_time_budget_truncates_with_marker(self, ex1):
        items = list(search_models(ex1.db, SearchBounds(max_size=6, time_budget=0.0)))
        assert items and isinstance(items[-1], Truncation)

    def test_relabeling_preserves_all_verdicts(self, ex1):
        # Push a found model through a random ground permutation and compare
        # every database verdict and every pairwise temporal verdict.
        rng = random.Random(61)
        models = [
            m
            for m in search_models(ex1.db, SearchBounds(max_size=4))
            if not isinstance(m, Truncation)
        ]
        names = ("X", "V", "Y", "_", "!")
        for model in rng.sample(models, min(12, len(models))):
            fs = model.factored
            n = fs.size
            perm = list(range(n))
            rng.shuffle(perm)
            ground = fs.ground
            factors = [
                Partition.from_block_of(
                    ground, {perm[s]: p.block_ids[s] for s in range(n)}
                )
                for p in fs.factors
            ]
            permuted_fs = FactoredSet(ground, factors)
            relabeled = [0] * n
            for s in range(n):
                relabeled[perm[s]] = model.labeling[s]
            permuted = Model(permuted_fs, tuple(relabeled), model.omega)
            for entry, permuted_entry in zip(
                models_database(model, ex1.db).entries,
                models_database(permuted, ex1.db).entries,
            ):
                assert entry == permuted_entry
            for a in names:
                for b in names:
                    lhs = before(
                        fs,
                        pullback(model, ex1.db.resolve(a)),
                        pullback(model, ex1.db.resolve(b)),
                    ).relation
                    rhs = before(
                        permuted_fs,
                        pullback(permuted, ex1.db.resolve(a)),
                        pullback(permuted, ex1.db.resolve(b)),
                    ).relation
                    assert lhs == rhs


class TestInferBefore:
    def test_holds_up_to_bound(self, ex1):
        verdict = infer_before(ex1.db, "X", "Y", SearchBounds(max_size=6))
        assert verdict.kind == "holds-up-to-bound"
        assert verdict.models_checked >= 1
        assert "size <= 6" in verdict.qualifier

    def test_reverse_is_refuted(self, ex1):
        verdict = infer_before(ex1.db, "Y", "X", SearchBounds(max_size=4))
        assert verdict.kind == "refuted"
        assert verdict.counterexample is not None
        fs = verdict.counterexample.factored
        hx = history(fs, pullback(verdict.counterexample, ex1.db.resolve("X")))
        hy = history(fs, pullback(verdict.counterexample, ex1.db.resolve("Y")))
        assert not (hy & hx == hy and hy != hx)

    def test_refutation_is_monotone_in_the_bound(self, ex1):
        for size in (4, 5):
            assert infer_before(ex1.db, "Y", "X", SearchBounds(max_size=size)).kind == "refuted"

    def test_antisymmetric_on_shared_bounds(self, ex1):
        # Strictness cannot hold both ways over the same nonempty model set.
        bounds = SearchBounds(max_size=4)
        forward = infer_before(ex1.db, "X", "Y", bounds)
        reverse = infer_before(ex1.db, "Y", "X", bounds)
        assert forward.kind == "holds-up-to-bound" and forward.models_checked >= 1
        assert reverse.kind == "refuted"

    def test_non_strict_variant(self, ex1):
        strict = infer_before(ex1.db, "X", "X", SearchBounds(max_size=3))
        assert strict.kind == "refuted"
        loose = infer_before(ex1.db, "X", "X", SearchBounds(max_size=3), strict=False)
        assert loose.kind == "holds-up-to-bound"

    def test_vacuous_when_nothing_models(self):
        db = _two_bit_db(
            orthogonal=frozenset(), dependent=frozenset({("_", "_", "_")})
        )
        verdict = infer_before(db, "X", "Y", SearchBounds(max_size=3))
        assert verdict.kind == "vacuous"
        assert verdict.models_checked == 0

    def test_truncation_is_reported(self, ex1):
        verdict = infer_before(
            ex1.db, "X", "Y", SearchBounds(max_size=6, time_budget=0.0)
        )
        assert verdict.truncated
        assert "truncated" in verdict.qualifier


class TestConsistency:
    def test_two_bit_db_is_consistent(self, ex1):
        verdict = is_consistent_up_to_bound(ex1.db, SearchBounds(max_size=4))
        assert verdict.consistent
        assert models_database(verdict.witness, ex1.db).ok

    def test_contradictory_db_is_not(self):
        db = _two_bit_db(
            orthogonal=frozenset({("X", "V", "_")}),
            dependent=frozenset({("X", "V", "_")}),
        )
        assert not is_consistent_up_to_bound(db, SearchBounds(max_size=4)).consistent

    def test_twelve_element_witness_proves_consistency(self, ex2):
        # Searching to size 12 is out of reach, but the bundled witness
        # settles the question directly.
        assert models_database(ex2.model, ex2.db).ok


class TestCompleteness:
    def test_sparse_db_is_incomplete(self, ex1):
        assert not is_complete(ex1.db)

    def test_single_point_space(self):
        omega = GroundSet(1)
        db = OrthogonalityDatabase(
            omega=omega,
            partitions={},
            orthogonal_triples=frozenset({("_", "_", "_")}),
            dependent_triples=frozenset(),
        )
        assert is_complete(db)

    def test_two_point_space_with_all_eight_triples(self):
        omega = GroundSet(2)
        names = ("_", "!")
        triples = {(a, b, c) for a in names for b in names for c in names}
        orthogonal = frozenset(t for t in triples if t[0] == "_" or t[1] == "_")
        db = OrthogonalityDatabase(
            omega=omega,
            partitions={},
            orthogonal_triples=orthogonal,
            dependent_triples=frozenset(triples) - orthogonal,
        )
        assert is_complete(db)

    def test_cap_guard(self):
        omega = GroundSet(9)
        db = OrthogonalityDatabase(
            omega=omega,
            partitions={},
            orthogonal_triples=frozenset(),
            dependent_triples=frozenset(),
        )
        with pytest.raises(ValidationError, match="cap"):
            is_complete(db)
