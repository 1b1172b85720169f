import csv
import io
import json
import sys

import numpy as np

from certified_deletion.bitvec import BitString
from certified_deletion.bounds import eta, optimal_nu, plan_params
from certified_deletion.configuration import load_config
from certified_deletion.epr_game import run_epr_game_oracle, SCENARIOS
from certified_deletion.errors import ConfigurationError
from certified_deletion.games import GameHarness
from certified_deletion.qsim import NoiseModel
from certified_deletion.scheme import CertifiedDeletionScheme, delete_ciphertext
from certified_deletion.serialization import (deserialize_certificate, deserialize_ciphertext, deserialize_keys,
                                              serialize_certificate, serialize_ciphertext, serialize_keys)
from certified_deletion.strategies import parse_strategy

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REJECTED = 2
EXIT_INFEASIBLE = 3


class CertifiedDeletionApp:
    """Runs one validated RunConfig; every cmd_* method returns the process exit code."""

    def __init__(self, run_config, logger, stdout=None):
        self.run_config = run_config
        self.config = run_config.config
        self._logger = logger.getChild("CertifiedDeletionApp")
        self._stdout = stdout or sys.stdout

    def run(self):
        command = getattr(self, 'cmd_' + self.run_config.subcommand, None)
        if command is None:
            raise ConfigurationError("Unknown subcommand '{}'".format(self.run_config.subcommand))
        return command()

    def cmd_keygen(self):
        params = self.config.get_scheme_params()
        aux, key = self._scheme(params).keygen(self._rng())
        self._write_text(self._required('out_path', '--out'), serialize_keys(params, aux, key) + '\n')
        self._logger.info("Wrote keys for n=%d, m=%d to %s", params.n, params.m, self.run_config.out_path)
        return EXIT_OK

    def cmd_encrypt(self):
        params, aux, key = self._load_keys()
        msg = BitString.from_bytes(self._read_bytes(self._required('in_path', '--in')), params.n)
        ct = self._scheme(params).encrypt(msg, aux, key)
        self._write_bytes(self._required('out_path', '--out'), serialize_ciphertext(ct, params))
        return EXIT_OK

    def cmd_decrypt(self):
        params, _, key = self._load_keys()
        ct = deserialize_ciphertext(self._read_bytes(self._required('in_path', '--in')), params)
        result = self._scheme(params).decrypt(key, ct, self._rng())
        if self.run_config.out_path is not None and result.flag:
            self._write_bytes(self.run_config.out_path, result.plaintext.to_bytes())
        self._emit({'plaintext_hex': result.plaintext.to_hex(), 'flag': result.flag}, to_stdout=True)
        return EXIT_OK if result.flag else EXIT_REJECTED

    def cmd_delete(self):
        ct = deserialize_ciphertext(self._read_bytes(self._required('in_path', '--in')))
        cert = delete_ciphertext(ct, self._rng())
        self._write_bytes(self._required('out_path', '--out'), serialize_certificate(cert))
        return EXIT_OK

    def cmd_verify(self):
        params, aux, key = self._load_keys()
        if self.run_config.aux_path is not None:
            aux_params, aux, _ = deserialize_keys(self._read_text(self.run_config.aux_path))
            if aux_params.m != params.m:
                raise ConfigurationError("auxiliary key is for m={}, decryption key for m={}".format(aux_params.m,
                                                                                                     params.m))
        cert = deserialize_certificate(self._read_bytes(self._required('cert_path', '--cert')), params)
        scheme = self._scheme(params)
        ok = scheme.verify(aux, key, cert)
        self._emit({'ok': ok, 'mismatches': scheme.count_mismatches(aux, key, cert),
                    'threshold': params.threshold}, to_stdout=True)
        return EXIT_OK if ok else EXIT_REJECTED

    def cmd_params(self):
        if self.run_config.action == 'plan':
            plan = plan_params(self.config.get_n(), self.config.get_delta(), self.config.get_target_eta(),
                               code=self.config.get_code(), logger=self._logger)
            self._emit(plan.to_dict())
            return EXIT_OK

        params = self.config.get_scheme_params()
        nu = self.config.get_nu()
        if nu is None:
            bound = optimal_nu(params.s, params.k, params.m, params.n, params.delta)
        else:
            bound = eta(params.s, params.k, params.m, params.n, params.delta, nu)
        doc = bound.to_dict()
        doc['params'] = params.to_dict()
        self._emit(doc)
        return EXIT_OK

    def cmd_simulate(self):
        strategy = parse_strategy(self.run_config.strategy or 'honest')
        report = self._harness().estimate_gap(strategy, self.run_config.trials, self.run_config.seed)
        self._emit(report.to_dict())
        return EXIT_REJECTED if report.violation else EXIT_OK

    def cmd_robustness(self):
        report = self._harness().estimate_robustness(self.run_config.trials, self.run_config.seed)
        self._emit(report.to_dict())
        return EXIT_REJECTED if report.exceeded else EXIT_OK

    def cmd_oracle(self):
        instance = self.config
        if self.run_config.in_path is not None:
            instance = load_config(self.run_config.in_path, self._logger)
        params = instance.get_scheme_params()
        scenario = instance.get_scenario()
        if scenario not in SCENARIOS:
            raise ConfigurationError(
                "Unknown oracle scenario '{}'; must be one of: {}".format(scenario, ', '.join(sorted(SCENARIOS)))
            )
        result = run_epr_game_oracle(params, SCENARIOS[scenario](params, instance.get_msg0(params.n)))

        if self.run_config.output_format == 'csv':
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator='\n')
            writer.writerow(('b', 'ok', 'b_prime', 'probability'))
            writer.writerows((b, ok, b_prime, repr(p)) for b, ok, b_prime, p in result.to_rows())
            self._write_or_print(buffer.getvalue())
        else:
            doc = result.to_dict()
            doc['scenario'] = scenario
            doc['params'] = params.to_dict()
            self._emit(doc)
        return EXIT_OK

    def _scheme(self, params):
        return CertifiedDeletionScheme(params, self._logger)

    def _harness(self):
        p = self.config.get_noise_probability()
        noise = NoiseModel(p) if p > 0 else None
        return GameHarness(self.config.get_scheme_params(), self._logger, self.run_config.get_workers(), noise)

    def _rng(self):
        return np.random.default_rng(self.run_config.seed)

    def _load_keys(self):
        return deserialize_keys(self._read_text(self._required('key_path', '--key')))

    def _required(self, attribute, flag):
        value = getattr(self.run_config, attribute)
        if value is None:
            raise ConfigurationError("'{}' needs {}".format(self.run_config.subcommand, flag))
        return value

    def _emit(self, doc, to_stdout=False):
        text = json.dumps(doc, indent=2, sort_keys=True) + '\n'
        if to_stdout:
            self._stdout.write(text)
        else:
            self._write_or_print(text)

    def _write_or_print(self, text):
        if self.run_config.out_path is None:
            self._stdout.write(text)
        else:
            self._write_text(self.run_config.out_path, text)

    @staticmethod
    def _read_bytes(path):
        try:
            with open(path, 'rb') as f:
                return f.read()
        except OSError as e:
            raise ConfigurationError("Cannot read {}: {}".format(path, e))

    @staticmethod
    def _read_text(path):
        try:
            with open(path, 'r') as f:
                return f.read()
        except OSError as e:
            raise ConfigurationError("Cannot read {}: {}".format(path, e))

    @staticmethod
    def _write_bytes(path, data):
        try:
            with open(path, 'wb') as f:
                f.write(data)
        except OSError as e:
            raise ConfigurationError("Cannot write {}: {}".format(path, e))

    @staticmethod
    def _write_text(path, text):
        try:
            with open(path, 'w') as f:
                f.write(text)
        except OSError as e:
            raise ConfigurationError("Cannot write {}: {}".format(path, e))
