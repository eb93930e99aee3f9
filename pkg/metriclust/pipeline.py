"""

Pipeline class to run the stages of a clustering experiment in sequence.

"""

# pylint: disable=E1101:no-member, W0201:attribute-defined-outside-init, W0511:fixme
# pylint: disable=C0103:invalid-name, R0902:too-many-instance-attributes
# pylint: disable=R0913:too-many-arguments, R0903:too-few-public-methods
# pylint: disable=W0212:protected-access

import inspect
import logging
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Union

import yaml

from metriclust.errors import ConfigError
from metriclust.progbar import ProgBar

logger = logging.getLogger(__name__)

StepSpec = Union[str, tuple]


@dataclass
class Stage:
    _num: int = None
    _id: str = None
    attribute_name: str = None
    method_name: str = None
    arguments: dict = None
    _method_call: Callable = None
    _parameters: dict = None
    _timestamp_start: float = None
    _timestamp_end: float = None
    _duration: float = None


class Pipeline:
    """
    A Pipeline runs a list of stages on a host object. Each stage calls a
    method of the host. When the stage names an attribute, the returned
    value is stored in the host under that name, and later stages receive
    it for any parameter with the same name.

    Parameters
    ----------
    host: object
        Object holding the stage methods and the intermediate results.
    description: str
        Description of the pipeline, shown by the progress bar.
    prog_bar: bool
        Whether to display a progress bar.
    subtask: bool
        Hand the progress bar to the host as `host.pbar`, so that long
        stages can draw their own steps below the stage bar.
    silent: bool
        Display nothing.
    """

    def __init__(
            self,
            host: object = None,
            description: str = None,
            prog_bar: bool = True,
            subtask: bool = False,
            silent: bool = False):
        self.host = host
        self.pipeline: List[Stage] = []
        self.description = description or "pipeline"
        self.prog_bar = prog_bar and not silent
        self.subtask = subtask
        self.attributes_: Dict[str, Any] = {}
        self.pbar = None

    def from_list(self, steps: List[StepSpec]) -> "Pipeline":
        """
        Load the pipeline from a list of steps. Each step is one of

            'method_name'
            ('method_name', {'param': value})
            ('new_attribute', 'method_name')
            ('new_attribute', 'method_name', {'param': value})
        """
        assert steps, "List of steps is empty. No steps to run."
        for step in steps:
            attribute_name, method_name, arguments = self._parse_step(step)
            stage = Stage(
                _num=len(self.pipeline),
                attribute_name=attribute_name,
                method_name=method_name,
                arguments=arguments)
            stage._id = f"{stage._num:03d}-{method_name}"
            self.pipeline.append(stage)
        return self

    def from_config(self, config_filename: str) -> "Pipeline":
        """
        Load the pipeline from a YAML file mapping stage ids to their
        `attribute`, `method` and `arguments`.

        Raises
        ------
        ConfigError
            If the file is not valid YAML or a stage is malformed.
        """
        with open(config_filename, 'r', encoding='utf-8') as file:
            try:
                config = yaml.safe_load(file)
            except yaml.YAMLError as exc:
                raise ConfigError(f"cannot parse {config_filename}: {exc}") from exc
        if not isinstance(config, dict) or not config:
            raise ConfigError(f"{config_filename} does not define any stage")
        self.pipeline.extend(self._process_config(config))
        return self

    def _process_config(self, config: dict) -> List[Stage]:
        stages = []
        for nr, (step_id, contents) in enumerate(config.items()):
            stage = Stage(_num=nr, _id=str(step_id))
            if contents is not None and not isinstance(contents, dict):
                raise ConfigError(f"Stage '{step_id}' must be a mapping")
            for key, value in (contents or {}).items():
                if key == 'attribute':
                    stage.attribute_name = value
                elif key == 'method':
                    stage.method_name = value
                elif key == 'arguments':
                    stage.arguments = value
                else:
                    raise ConfigError(
                        f"Key '{key}' not recognized in stage '{step_id}'")
            if stage.method_name is None:
                raise ConfigError(f"Stage '{step_id}' does not name a method")
            stages.append(stage)
        return stages

    def _parse_step(self, step: StepSpec):
        if not isinstance(step, tuple):
            step = (step,)
        if not 0 < len(step) < 4:
            raise ConfigError(f"Step '{step}' must have between 1 and 3 elements")

        if len(step) == 1 and isinstance(step[0], str):
            return None, step[0], None
        if len(step) == 2:
            if isinstance(step[0], str) and isinstance(step[1], dict):
                return None, step[0], step[1]
            if isinstance(step[0], str) and isinstance(step[1], str):
                return step[0], step[1], None
        if len(step) == 3 and isinstance(step[0], str) and \
                isinstance(step[1], str) and isinstance(step[2], dict):
            return step[0], step[1], step[2]
        raise ConfigError(
            f"Step '{step}' must be 'method', (method, dict), "
            f"(attribute, method) or (attribute, method, dict)")

    def _get_callable_method(self, method_name: str) -> Callable:
        name = str(method_name)
        method = getattr(self.host, name, None)
        if name.startswith('_') or not callable(method):
            raise ConfigError(f"Method '{method_name}' not found in host")
        return method

    @staticmethod
    def _get_method_signature(method_call: Callable) -> dict:
        parameters = inspect.signature(method_call).parameters
        return {name: p.default for name, p in parameters.items()
                if p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)}

    def _lookup(self, name: str):
        if name in self.attributes_:
            return True, self.attributes_[name]
        if self.host is not None and hasattr(self.host, name):
            return True, getattr(self.host, name)
        return False, None

    def _build_params(self, method_parameters: dict, method_arguments: dict) -> dict:
        """
        Values for every parameter of a stage method: explicit arguments
        first (a string naming an earlier result is replaced by it), then
        earlier results or host attributes with the parameter's name, then
        the parameter's default.
        """
        method_arguments = method_arguments or {}
        if not isinstance(method_arguments, dict):
            raise ConfigError(f"Stage arguments must be a mapping, got {method_arguments!r}")
        unknown = set(method_arguments) - set(method_parameters)
        if unknown:
            raise ConfigError(f"Parameters {sorted(unknown)} not accepted by the method")

        params = {}
        for parameter, default_value in method_parameters.items():
            if parameter in method_arguments:
                value = method_arguments[parameter]
                if isinstance(value, str):
                    found, stored = self._lookup(value)
                    value = stored if found else value
                params[parameter] = value
                continue
            found, stored = self._lookup(parameter)
            if found:
                params[parameter] = stored
            elif default_value is not inspect.Parameter.empty:
                params[parameter] = default_value
            else:
                raise ConfigError(
                    f"Parameter '{parameter}' not found in host object or results")
        return params

    def run(self):
        """
        Run every stage in order.
        """
        assert self.pipeline, "Pipeline is empty. No steps to run."
        if self.prog_bar:
            self.pbar = ProgBar(self.description, len(self.pipeline))
            if self.subtask and self.host is not None:
                self.host.pbar = self.pbar

        logger.info("Pipeline '%s' started", self.description)
        try:
            for stage in self.pipeline:
                self._run_stage(stage)
                if self.pbar is not None:
                    self.pbar.update_subtask(self.description, stage._num + 1)
        finally:
            if self.pbar is not None:
                self.pbar.close()
                self.pbar = None
                if self.subtask and self.host is not None:
                    self.host.pbar = None
        logger.info("Pipeline '%s' finished", self.description)
        return self

    def _run_stage(self, stage: Stage):
        stage._method_call = self._get_callable_method(stage.method_name)
        stage._parameters = self._get_method_signature(stage._method_call)
        params = self._build_params(stage._parameters, stage.arguments)

        logger.debug("Running stage %s", stage._id)
        stage._timestamp_start = time.time()
        value = stage._method_call(**params)
        stage._timestamp_end = time.time()
        stage._duration = stage._timestamp_end - stage._timestamp_start
        logger.debug("Stage %s finished in %.3f s", stage._id, stage._duration)

        if stage.attribute_name is not None:
            self.attributes_[stage.attribute_name] = value
            if self.host is not None:
                setattr(self.host, stage.attribute_name, value)
