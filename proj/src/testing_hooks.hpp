#pragma once

// Test-only controls. Present only in the dpsvm_testing library
// (DPSVM_TEST_HOOKS); the release library has no way to alter the noise.

#ifdef DPSVM_TEST_HOOKS

namespace dpsvm::testing {

/// While alive, private training adds an all-zero noise vector on this thread.
class ScopedZeroNoise {
public:
    ScopedZeroNoise();
    ~ScopedZeroNoise();
    ScopedZeroNoise(const ScopedZeroNoise&) = delete;
    ScopedZeroNoise& operator=(const ScopedZeroNoise&) = delete;

private:
    bool previous_;
};

bool zero_noise_active() noexcept;

}  // namespace dpsvm::testing

#endif
