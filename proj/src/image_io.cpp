#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "mprl/image.hpp"

namespace mprl {

Image8 load_image_rgb(const std::string& path) {
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty()) throw std::runtime_error("cannot read image: " + path);
    Image8 out(bgr.rows, bgr.cols);
    for (int r = 0; r < bgr.rows; ++r) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < bgr.cols; ++c) {
            out.at(r, c, 0) = row[c][2];
            out.at(r, c, 1) = row[c][1];
            out.at(r, c, 2) = row[c][0];
        }
    }
    return out;
}

void save_png_rgb(const Image8& img, const std::string& path) {
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int r = 0; r < img.height; ++r) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < img.width; ++c) {
            row[c][2] = img.at(r, c, 0);
            row[c][1] = img.at(r, c, 1);
            row[c][0] = img.at(r, c, 2);
        }
    }
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", bgr, bytes))
        throw std::runtime_error("cannot encode image: " + path);
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write image: " + path);
        out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    }
    std::filesystem::rename(tmp, target);
}

Image8 rotate_cw(const Image8& img, Orientation by) {
    if (by == Orientation::Deg0) return img;
    Image8 cur = img;
    for (int k = 0; k < int(by); ++k) {
        Image8 next(cur.width, cur.height);
        for (int r = 0; r < next.height; ++r)
            for (int c = 0; c < next.width; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    next.at(r, c, ch) = cur.at(cur.height - 1 - c, r, ch);
        cur = std::move(next);
    }
    return cur;
}

}  // namespace mprl
