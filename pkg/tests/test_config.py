"""Scenario configs: validation with dotted-path errors, effective-config
echo, content hashing, and YAML loading."""

import math
import warnings

import pytest

from chlab.config import (
    CertificationWarning,
    ConfigError,
    Scenario,
    canonical_json,
    load_scenario,
    parse_scenario,
    scenario_from_dict,
)
from chlab.scenarios import builtin_names, builtin_scenario, describe_builtins
from chlab.weights import StandardFamily

TINY = {
    "name": "tiny",
    "grid": {"L": 20.0, "N": 256},
    "initial_data": {"kind": "gaussian", "amplitude": 1.0, "width": 1.0,
                     "center": 0.0},
    "solver": {"t_end": 0.1},
}


def tiny(**overrides) -> dict:
    data = {k: (dict(v) if isinstance(v, dict) else v) for k, v in TINY.items()}
    data.update(overrides)
    return data


class TestValidation:
    def test_minimal_config_parses(self):
        s = scenario_from_dict(TINY)
        assert s.name == "tiny"
        assert s.grid.N == 256
        assert s.solver.t_end == 0.1
        assert s.weights_to_track == ()
        assert not s.profiles_enabled and s.predictors_enabled
        assert s.rate_cap_factor is None

    @pytest.mark.parametrize("section", ["grid", "initial_data", "solver"])
    def test_required_sections(self, section):
        data = tiny()
        del data[section]
        with pytest.raises(ConfigError, match=f"{section}: required section"):
            scenario_from_dict(data)

    def test_name_required_and_clean(self):
        data = tiny()
        del data["name"]
        with pytest.raises(ConfigError, match="name: required"):
            scenario_from_dict(data)
        with pytest.raises(ConfigError, match="spaces or slashes"):
            scenario_from_dict(tiny(name="has space"))
        with pytest.raises(ConfigError, match="spaces or slashes"):
            scenario_from_dict(tiny(name="a/b"))

    def test_unknown_top_key_lists_allowed(self):
        with pytest.raises(ConfigError, match="unknown key.*'extra'.*allowed:"):
            scenario_from_dict(tiny(extra=1))

    def test_grid_errors_carry_dotted_paths(self):
        with pytest.raises(ConfigError, match="grid.N: required"):
            scenario_from_dict(tiny(grid={"L": 20.0}))
        with pytest.raises(ConfigError, match="grid: .*power of two"):
            scenario_from_dict(tiny(grid={"L": 20.0, "N": 100}))
        with pytest.raises(ConfigError, match="grid.N: expected an integer"):
            scenario_from_dict(tiny(grid={"L": 20.0, "N": 256.5}))
        with pytest.raises(ConfigError, match="grid.L: expected a number"):
            scenario_from_dict(tiny(grid={"L": "wide", "N": 256}))

    def test_initial_kind_error_lists_choices(self):
        bad = tiny(initial_data={"kind": "sine"})
        with pytest.raises(
            ConfigError,
            match="initial_data.kind: unknown initial-data kind 'sine'.*gaussian",
        ):
            scenario_from_dict(bad)

    def test_initial_unknown_field(self):
        bad = tiny(initial_data=dict(TINY["initial_data"], skew=2.0))
        with pytest.raises(ConfigError, match="initial_data: unknown key.*'skew'"):
            scenario_from_dict(bad)

    def test_potential_shape_validated(self):
        bad = tiny(initial_data={"kind": "from_potential",
                                 "m0": {"shape": "box"}})
        with pytest.raises(ConfigError, match="initial_data.m0.shape"):
            scenario_from_dict(bad)

    def test_solver_errors_carry_dotted_paths(self):
        data = tiny(solver={})
        with pytest.raises(ConfigError, match="solver.t_end: required"):
            scenario_from_dict(data)
        with pytest.raises(ConfigError, match="solver: .*cfl"):
            scenario_from_dict(tiny(solver={"t_end": 0.1, "cfl": 0.0}))
        with pytest.raises(ConfigError, match="solver.dealias: expected true/false"):
            scenario_from_dict(tiny(solver={"t_end": 0.1, "dealias": "yes"}))

    def test_tracked_weight_paths(self):
        bad = tiny(weights_to_track=[{"p": 2}])
        with pytest.raises(ConfigError, match=r"weights_to_track\[0\].weight: required"):
            scenario_from_dict(bad)
        bad = tiny(weights_to_track=[
            {"weight": {"kind": "standard"}, "p": 0.5}])
        with pytest.raises(ConfigError, match=r"weights_to_track\[0\].p: .*>= 1"):
            scenario_from_dict(bad)
        bad = tiny(weights_to_track=[
            {"weight": {"kind": "gaussian_weight"}}])
        with pytest.raises(
            ConfigError, match=r"weights_to_track\[0\].weight.kind: unknown"
        ):
            scenario_from_dict(bad)
        with pytest.raises(ConfigError, match="expected a list"):
            scenario_from_dict(tiny(weights_to_track="all"))

    def test_p_accepts_inf_spelling(self):
        s = scenario_from_dict(tiny(weights_to_track=[
            {"weight": {"kind": "standard", "a": 0.5}, "p": "inf"}]))
        assert math.isinf(s.weights_to_track[0].p)
        echoed = s.effective_config()["weights_to_track"][0]["p"]
        assert echoed == "inf"
        with pytest.raises(ConfigError, match="expected a number or 'inf'"):
            scenario_from_dict(tiny(weights_to_track=[
                {"weight": {"kind": "standard"}, "p": "sup"}]))

    def test_rate_cap_factor_must_exceed_one(self):
        with pytest.raises(ConfigError, match="rate_cap_factor: must exceed 1"):
            scenario_from_dict(tiny(rate_cap_factor=1.0))
        s = scenario_from_dict(tiny(rate_cap_factor=1.5))
        assert s.rate_cap_factor == 1.5

    def test_noncertifiable_tracked_weight_warns_but_parses(self):
        data = tiny(weights_to_track=[
            {"weight": {"kind": "standard", "a": 0.1, "b": 2.0}, "p": 2}])
        with pytest.warns(CertificationWarning, match="faster than exponential"):
            s = scenario_from_dict(data)
        assert not s.weights_to_track[0].weight.certifiable

    def test_boundary_contaminated_initial_rejected(self):
        # tails of e^{-|x|/10} are ~e^{-2} at the edge of a half-width-20 box
        bad = tiny(initial_data={"kind": "mollified_exponential",
                                 "amplitude": 1.0, "rate": 0.1,
                                 "center": 0.0, "mollify_width": 0.1})
        with pytest.raises(ConfigError, match="boundary-contaminated on grid"):
            scenario_from_dict(bad)
        s = scenario_from_dict(bad, check_initial=False)
        assert isinstance(s, Scenario)


class TestEffectiveConfigAndHash:
    def test_echo_spells_out_every_default(self):
        eff = scenario_from_dict(TINY).effective_config()
        assert sorted(eff) == [
            "grid", "initial_data", "name", "predictors_enabled",
            "profiles_enabled", "rate_cap_factor", "solver",
            "weights_to_track",
        ]
        assert sorted(eff["solver"]) == [
            "boundary_tol", "cfl", "dealias", "dt_floor", "dt_max",
            "slope_stop", "snapshot_stride", "t_end",
        ]
        assert eff["solver"]["cfl"] == 0.3
        assert eff["weights_to_track"] == []

    def test_echo_reparses_to_the_same_hash(self):
        s = scenario_from_dict(TINY)
        again = scenario_from_dict(s.effective_config())
        assert again.content_hash() == s.content_hash()
        assert again == s

    def test_hash_canary(self):
        # frozen: any change to defaults, canonicalization, or echo layout
        # shows up here before it silently relocates artifact directories
        s = scenario_from_dict(TINY)
        assert s.content_hash() == "3ccc62056ab5"
        assert s.run_dirname() == "tiny-3ccc62056ab5"

    def test_explicit_default_hashes_like_omitted_default(self):
        explicit = tiny(solver={"t_end": 0.1, "cfl": 0.3})
        assert (scenario_from_dict(explicit).content_hash()
                == scenario_from_dict(TINY).content_hash())

    def test_any_value_change_moves_the_hash(self):
        changed = tiny(solver={"t_end": 0.2})
        assert (scenario_from_dict(changed).content_hash()
                != scenario_from_dict(TINY).content_hash())

    def test_canonical_json_is_order_insensitive(self):
        a = canonical_json({"b": 1, "a": [1, 2]})
        b = canonical_json({"a": [1, 2], "b": 1})
        assert a == b == '{"a":[1,2],"b":1}'

    def test_with_profiles_flips_one_flag(self):
        s = scenario_from_dict(TINY)
        p = s.with_profiles()
        assert p.profiles_enabled and not s.profiles_enabled
        assert p.content_hash() != s.content_hash()

    def test_tracked_weights_roundtrip(self):
        data = tiny(weights_to_track=[
            {"weight": {"kind": "standard", "a": 0.5, "c": 1.0}, "p": 2},
            {"weight": {"kind": "one_sided", "a": 0.25}},
        ])
        s = scenario_from_dict(data)
        assert s.weights_to_track[0].weight == StandardFamily(a=0.5, c=1.0)
        assert s.weights_to_track[1].p == math.inf
        again = scenario_from_dict(s.effective_config())
        assert again.weights_to_track == s.weights_to_track


class TestYamlFront:
    def test_parse_yaml_text(self):
        s = parse_scenario(
            """
            name: demo
            grid: {L: 20.0, N: 256}
            initial_data: {kind: gaussian, amplitude: 1.0, width: 1.0, center: 0.0}
            solver: {t_end: 0.1}
            """
        )
        assert s.name == "demo"

    def test_yaml_error_reports_position(self):
        with pytest.raises(ConfigError, match=r"invalid YAML at line \d+"):
            parse_scenario("name: [unclosed\ngrid: {L: 1}\n: ]]")

    def test_empty_and_non_mapping(self):
        with pytest.raises(ConfigError, match="empty config"):
            parse_scenario("")
        with pytest.raises(ConfigError, match="mapping at top level, got list"):
            parse_scenario("- a\n- b\n")

    def test_load_uses_stem_as_default_name(self, tmp_path):
        text = (
            "grid: {L: 20.0, N: 256}\n"
            "initial_data: {kind: gaussian, amplitude: 1.0, width: 1.0, center: 0.0}\n"
            "solver: {t_end: 0.1}\n"
        )
        path = tmp_path / "my-run.yaml"
        path.write_text(text)
        assert load_scenario(path).name == "my-run"
        # an explicit name wins over the stem
        path.write_text("name: other\n" + text)
        assert load_scenario(path).name == "other"

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read config"):
            load_scenario(tmp_path / "absent.yaml")


class TestBuiltins:
    def test_nine_builtins_with_stable_names(self):
        assert builtin_names() == [
            "algebraic-persistence", "decay-threshold-sweep",
            "exponential-rate-cap", "fast-decay-breakdown", "peakon-travel",
            "positive-momentum-global", "sign-change-momentum",
            "steep-odd-breakdown", "tail-profiles",
        ]

    @pytest.mark.parametrize("name", [
        "algebraic-persistence", "decay-threshold-sweep",
        "exponential-rate-cap", "fast-decay-breakdown", "peakon-travel",
        "positive-momentum-global", "sign-change-momentum",
        "steep-odd-breakdown", "tail-profiles",
    ])
    def test_each_builtin_validates(self, name):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            s = builtin_scenario(name)
        assert s.name == name
        # the echo must reparse to the identical scenario
        assert scenario_from_dict(s.effective_config()) == s

    def test_dirname_canary(self):
        assert (builtin_scenario("peakon-travel").run_dirname()
                == "peakon-travel-a88e133665ca")

    def test_unknown_builtin_lists_names(self):
        with pytest.raises(KeyError, match="peakon-travel"):
            builtin_scenario("nonesuch")

    def test_descriptions_cover_all(self):
        entries = dict(describe_builtins())
        assert sorted(entries) == builtin_names()
        assert all(desc for desc in entries.values())
