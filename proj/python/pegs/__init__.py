# Copyright 2026 The PeGS Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Private synthetic categorical data with perturbed Gibbs sampling."""

from ._pegs import (
    Blocks,
    Dataset,
    PegsError,
    PmiModels,
    Schema,
    alpha_for_block,
    alpha_for_epsilon,
    alpha_for_ldiversity,
    attack_categorical,
    attack_numeric,
    combine_estimates,
    conditional_distance,
    disintegrate,
    fit_pmi,
    fit_regression,
    generate_hospital_data,
    hospital_schema,
    marginal_distance,
    mutual_information,
    perturb_probabilities,
    pmi_synthesize,
    population_uniqueness,
    regression_distance,
    synthesize,
)

__all__ = [
    "Blocks",
    "Dataset",
    "PegsError",
    "PmiModels",
    "Schema",
    "alpha_for_block",
    "alpha_for_epsilon",
    "alpha_for_ldiversity",
    "attack_categorical",
    "attack_numeric",
    "combine_estimates",
    "conditional_distance",
    "disintegrate",
    "fit_pmi",
    "fit_regression",
    "generate_hospital_data",
    "hospital_schema",
    "marginal_distance",
    "mutual_information",
    "perturb_probabilities",
    "pmi_synthesize",
    "population_uniqueness",
    "regression_distance",
    "synthesize",
]
