// irsfd  simulation and optimization toolkit for IRS-assisted full-duplex links
// Copyright (C) 2026 irsfd contributors
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

#include <stdexcept>

#include "irsfd/convex.hpp"

namespace irsfd {

int ConicProgram::add_var(const std::string& name) { return add_vars(1, name); }

int ConicProgram::add_vars(int n, const std::string&) {
    if (n <= 0) {
        throw std::invalid_argument("ConicProgram: variable count must be positive");
    }
    const int first = num_vars_;
    num_vars_ += n;
    c_store_.resize(num_vars_, 0.0);
    return first;
}

void ConicProgram::add_objective(int var, double coeff) {
    if (var < 0 || var >= num_vars_) {
        throw std::out_of_range("ConicProgram: objective variable out of range");
    }
    c_store_[var] += coeff;
}

void ConicProgram::begin_block(ConeType type, int size, const std::string& tag) {
    if (size <= 0) {
        throw std::invalid_argument("ConicProgram: block size must be positive");
    }
    if (type == ConeType::kExp && size != 3) {
        throw std::invalid_argument("ConicProgram: exponential cone blocks have size 3");
    }
    if (type == ConeType::kSoc && size < 1) {
        throw std::invalid_argument("ConicProgram: second-order cone blocks need a head row");
    }
    block_base_ = num_rows_;
    num_rows_ += size;
    b_store_.resize(num_rows_, 0.0);
    blocks_.push_back(ConeBlock{type, size, tag});
}

void ConicProgram::add_entry(int local_row, int var, double coeff) {
    if (block_base_ < 0) {
        throw std::logic_error("ConicProgram: add_entry before begin_block");
    }
    if (local_row < 0 || block_base_ + local_row >= num_rows_) {
        throw std::out_of_range("ConicProgram: row outside current block");
    }
    if (var < 0 || var >= num_vars_) {
        throw std::out_of_range("ConicProgram: variable out of range");
    }
    if (coeff != 0.0) {
        triplets_.push_back(Triplet{block_base_ + local_row, var, coeff});
    }
}

void ConicProgram::set_rhs(int local_row, double value) {
    if (block_base_ < 0) {
        throw std::logic_error("ConicProgram: set_rhs before begin_block");
    }
    if (local_row < 0 || block_base_ + local_row >= num_rows_) {
        throw std::out_of_range("ConicProgram: row outside current block");
    }
    b_store_[block_base_ + local_row] = value;
}

void ConicProgram::add_eq(const std::vector<std::pair<int, double>>& terms, double rhs,
                          const std::string& tag) {
    begin_block(ConeType::kZero, 1, tag);
    for (const auto& [var, coeff] : terms) {
        add_entry(0, var, coeff);
    }
    set_rhs(0, rhs);
}

void ConicProgram::add_le(const std::vector<std::pair<int, double>>& terms, double rhs,
                          const std::string& tag) {
    begin_block(ConeType::kNonneg, 1, tag);
    for (const auto& [var, coeff] : terms) {
        add_entry(0, var, coeff);
    }
    set_rhs(0, rhs);
}

int ConicProgram::count_blocks(const std::string& tag) const {
    int n = 0;
    for (const ConeBlock& blk : blocks_) {
        if (blk.tag == tag) {
            ++n;
        }
    }
    return n;
}

int ConicProgram::rows_in_blocks(const std::string& tag) const {
    int n = 0;
    for (const ConeBlock& blk : blocks_) {
        if (blk.tag == tag) {
            n += blk.size;
        }
    }
    return n;
}

RVec ConicProgram::rhs_vector() const {
    return Eigen::Map<const RVec>(b_store_.data(), static_cast<Eigen::Index>(b_store_.size()));
}

RVec ConicProgram::objective_vector() const {
    return Eigen::Map<const RVec>(c_store_.data(), static_cast<Eigen::Index>(c_store_.size()));
}

}  // namespace irsfd
