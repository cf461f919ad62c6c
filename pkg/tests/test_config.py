"""
Tests du chargement de la configuration.
"""
import pytest
import yaml

from src.config.settings import deep_merge, get_setting, load_defaults, load_settings
from src.exceptions.composition_exceptions import ConfigurationError


def test_defaults_contain_all_sections():
    settings = load_defaults()
    for section in ('service_model', 'perception', 'working_memory', 'episodic_memory', 'semantic_memory',
                    'behavior_network', 'procedural_memory', 'agent', 'simulation', 'baselines', 'experiment'):
        assert section in settings
    assert get_setting(settings, 'behavior_network.theta') == 45.0


def test_cli_overrides_apply():
    settings = load_settings(overrides={'experiment': {'replications': 2}})
    assert settings['experiment']['replications'] == 2
    assert settings['experiment']['seed'] == 1


def test_config_file_wins_over_overrides(tmp_path):
    path = tmp_path / 'config.yaml'
    path.write_text(yaml.safe_dump({'experiment': {'replications': 5}}))
    settings = load_settings(str(path), {'experiment': {'replications': 2}})
    assert settings['experiment']['replications'] == 5


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigurationError) as info:
        deep_merge(load_defaults(), {'experiment': {'replicas': 3}})
    assert info.value.key == 'experiment.replicas'


def test_scalar_for_section_is_rejected():
    with pytest.raises(ConfigurationError):
        deep_merge(load_defaults(), {'agent': 3})


def test_invalid_file(tmp_path):
    path = tmp_path / 'bad.yaml'
    path.write_text('- a\n- b\n')
    with pytest.raises(ConfigurationError):
        load_settings(str(path))


def test_get_setting_missing_key():
    with pytest.raises(ConfigurationError):
        get_setting(load_defaults(), 'agent.missing')
