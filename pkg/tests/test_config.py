import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from pydantic import ValidationError

from dresg.config import (
    THREADS_ENV,
    ScenarioFile,
    Settings,
    SweepFile,
    find_config,
)
from dresg.models import ScenarioParseError, ScenarioValidationError
from dresg.routing import RoutingModel
from dresg.topology import Spreading


class TestSettings(unittest.TestCase):
    def test_defaults_without_file(self) -> None:
        with mock.patch.dict(os.environ, {}, clear=True):
            settings = Settings.load(None)
        self.assertEqual(settings.search.threads, 1)
        self.assertEqual(settings.search.max_rings, 10)
        self.assertEqual(settings.output.format, "csv")
        self.assertEqual(settings.output.significant_digits, 6)
        self.assertIsNone(settings.logging.warning_log)

    def test_yaml_file_and_environment_override(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.yaml"
            path.write_text(
                "search:\n  threads: 3\n  max_rings: 8\noutput:\n  format: json\n",
                encoding="utf-8",
            )
            with mock.patch.dict(os.environ, {}, clear=True):
                settings = Settings.load(path)
            self.assertEqual(settings.search.threads, 3)
            self.assertEqual(settings.search.max_rings, 8)
            self.assertEqual(settings.output.format, "json")
            with mock.patch.dict(os.environ, {THREADS_ENV: "6"}):
                self.assertEqual(Settings.load(path).search.threads, 6)

    def test_invalid_values(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.yaml"
            path.write_text("search:\n  threads: 0\n", encoding="utf-8")
            with self.assertRaises(ScenarioValidationError) as ctx:
                Settings.load(path)
            self.assertEqual(ctx.exception.field_path, "search.threads")
            with mock.patch.dict(os.environ, {THREADS_ENV: "many"}):
                with self.assertRaises(ScenarioValidationError):
                    Settings.load(None)

    def test_unparseable_yaml(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.yaml"
            path.write_text("search: [unclosed\n", encoding="utf-8")
            with self.assertRaises(ScenarioParseError):
                Settings.load(path)

    def test_find_config(self) -> None:
        explicit = Path("/somewhere/config.yaml")
        self.assertEqual(find_config(explicit), explicit)


class TestScenarioFile(unittest.TestCase):
    def test_flat_keys_and_defaults(self) -> None:
        spec = ScenarioFile.model_validate(
            {"R": 1, "c": 1, "B": 1, "transceiver": "CC1200"}
        )
        self.assertEqual(spec.network.rings, 1)
        self.assertIsNone(spec.network.max_distance)
        self.assertEqual(spec.network.spreading, Spreading.EQUIDISTANT)
        self.assertEqual(spec.packet.payload_bytes, 15)
        self.assertEqual(spec.packet.packet_bytes, 65)
        self.assertEqual(spec.environment.carrier_frequency_hz, 868e6)
        self.assertEqual(spec.environment.rx_antenna_gain_dbi, 3.0)
        self.assertTrue(spec.aggregation)
        self.assertEqual(spec.models, list(RoutingModel))

    def test_nested_network(self) -> None:
        spec = ScenarioFile.model_validate(
            {
                "network": {"rings": 4, "children_ratio": 2, "spreading": "fibonacci"},
                "transceiver": "SX1272",
                "models": ["optimal_hop", "optimal_hop"],
            }
        )
        self.assertEqual(spec.network.children_ratio, 2)
        self.assertEqual(spec.network.spreading, Spreading.FIBONACCI)
        self.assertEqual(spec.models, [RoutingModel.OPTIMAL_HOP])

    def test_packet_must_fit(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "bad.json"
            path.write_text(
                '{"R": 2, "c": 2, "transceiver": "CC1200",'
                ' "packet": {"L_d": 40, "L_h": 2, "L_DP": 30}}',
                encoding="utf-8",
            )
            with self.assertRaises(ScenarioValidationError) as ctx:
                ScenarioFile.load(path)
            self.assertEqual(ctx.exception.field_path, "packet")
            self.assertEqual(ctx.exception.exit_code, 3)

    def test_unknown_key(self) -> None:
        with self.assertRaises(ValidationError):
            ScenarioFile.model_validate({"R": 2, "c": 2, "transceiver": "x", "rings": 3})

    def test_top_level_must_be_a_mapping(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "list.json"
            path.write_text("[1, 2]", encoding="utf-8")
            with self.assertRaises(ScenarioParseError) as ctx:
                ScenarioFile.load(path)
            self.assertEqual(ctx.exception.exit_code, 2)


class TestSweepFile(unittest.TestCase):
    def test_points(self) -> None:
        spec = SweepFile.model_validate(
            {
                "id": "rings",
                "variable": "R",
                "range": [2, 4],
                "transceivers": ["CC1200"],
                "template": {"R": 9, "c": 3},
            }
        )
        self.assertEqual(list(spec.values), [2, 3, 4])
        point = spec.point(3, "CC1200")
        self.assertEqual(point.network.rings, 3)
        self.assertEqual(point.network.children_ratio, 3)
        self.assertEqual(point.scenario_id, "rings-R3-CC1200")

    def test_children_sweep_replaces_nested_key(self) -> None:
        spec = SweepFile.model_validate(
            {
                "variable": "c",
                "range": [1, 2],
                "transceivers": ["SX1272"],
                "template": {"network": {"rings": 5, "children_ratio": 7}},
            }
        )
        self.assertEqual(spec.point(2, "SX1272").network.children_ratio, 2)

    def test_bad_range(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "sweep.json"
            path.write_text(
                '{"variable": "R", "range": [4, 2], "transceivers": ["CC1200"]}',
                encoding="utf-8",
            )
            with self.assertRaises(ScenarioValidationError) as ctx:
                SweepFile.load(path)
            self.assertEqual(ctx.exception.field_path, "range")

    def test_broken_template_fails_on_load(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "sweep.json"
            path.write_text(
                '{"variable": "R", "range": [1, 2], "transceivers": ["CC1200"],'
                ' "template": {"c": 0}}',
                encoding="utf-8",
            )
            with self.assertRaises(ScenarioValidationError):
                SweepFile.load(path)


if __name__ == "__main__":
    unittest.main()
