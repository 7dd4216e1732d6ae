// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/kernels.hpp"
#include "deramg/errors.hpp"

#include <cstdlib>
#include <cstring>

namespace deramg::kernels
{

namespace detail
{

bool cpu_has_avx2()
{
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

} // namespace detail

namespace
{

const Ops* select_default()
{
    const char* env = std::getenv("DERAMG_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0)
        return &detail::scalar_ops;
#ifdef DERAMG_KERNELS_AVX2
    if (env && std::strcmp(env, "avx2") == 0)
    {
        if (!detail::cpu_has_avx2())
            throw Error("DERAMG_KERNELS=avx2 requested but the CPU lacks AVX2");
        return &detail::avx2_ops;
    }
    if (detail::cpu_has_avx2())
        return &detail::avx2_ops;
#else
    if (env && std::strcmp(env, "avx2") == 0)
        throw Error("this build has no AVX2 kernel lane");
#endif
    return &detail::scalar_ops;
}

const Ops*& current()
{
    static const Ops* ops = select_default();
    return ops;
}

} // namespace

const Ops& active()
{
    return *current();
}

Lane active_lane()
{
    return current() == &detail::scalar_ops ? Lane::Scalar : Lane::Avx2;
}

bool lane_available(Lane lane)
{
    if (lane == Lane::Scalar)
        return true;
#ifdef DERAMG_KERNELS_AVX2
    return detail::cpu_has_avx2();
#else
    return false;
#endif
}

const Ops& ops_for(Lane lane)
{
    if (lane == Lane::Scalar)
        return detail::scalar_ops;
#ifdef DERAMG_KERNELS_AVX2
    if (detail::cpu_has_avx2())
        return detail::avx2_ops;
#endif
    throw Error("requested kernel lane is not available");
}

void force_lane(Lane lane)
{
    current() = &ops_for(lane);
}

} // namespace deramg::kernels
