// SPDX-License-Identifier: Apache-2.0
//
// mmwdiv: link-level simulator for 60 GHz spatial diversity beamforming
// Copyright (C) 2026 The mmwdiv authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMWDIV_MMWDIV_HPP
#define MMWDIV_MMWDIV_HPP

#include "mmwdiv/arraygeom.hpp"
#include "mmwdiv/beamform.hpp"
#include "mmwdiv/channel.hpp"
#include "mmwdiv/phy.hpp"
#include "mmwdiv/scenario.hpp"
#include "mmwdiv/tracer.hpp"

#endif
