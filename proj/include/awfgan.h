/* C interface to the fusion library: grayscale images, generator
 * checkpoints, training, fusion, quality metrics, the Haar transform, and
 * target-mask extraction. Every function that can fail returns awf_status;
 * on failure awf_last_error() holds a message for the calling thread until
 * its next failing call. Objects returned through out-parameters are owned
 * by the caller and released with the matching _free function. */
#ifndef AWFGAN_H
#define AWFGAN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum awf_status {
  AWF_OK = 0,
  AWF_ERR_INVALID_ARGUMENT = 1,
  AWF_ERR_SHAPE_MISMATCH = 2,
  AWF_ERR_IO = 3,
  AWF_ERR_FORMAT = 4,
  AWF_ERR_VERSION = 5,
  AWF_ERR_NUMERIC = 6,
  AWF_ERR_UNKNOWN = 7
} awf_status;

/* Library version string, static storage. */
const char* awf_version(void);

/* Message of the calling thread's most recent failure, never NULL. */
const char* awf_last_error(void);

/* ---- images ----------------------------------------------------------- */

/* Grayscale, row major, intensities in [0,1]. */
typedef struct awf_image awf_image;

awf_status awf_image_create(int height, int width, awf_image** out);

/* Format by extension: .pgm (P2/P5) or .png; color PNG is reduced to luma. */
awf_status awf_image_load(const char* path, awf_image** out);
awf_status awf_image_save(const awf_image* img, const char* path);

/* Zero on a NULL image. */
int awf_image_height(const awf_image* img);
int awf_image_width(const awf_image* img);

/* Borrowed pointer to the height*width pixel block; valid until the image
 * is freed. NULL on a NULL image. */
double* awf_image_pixels(awf_image* img);

/* Align-corners bilinear resampling. */
awf_status awf_image_resize(const awf_image* img, int height, int width,
                            awf_image** out);

void awf_image_free(awf_image* img);

/* ---- checkpoints ------------------------------------------------------ */

typedef struct awf_checkpoint awf_checkpoint;

awf_status awf_checkpoint_load(const char* path, awf_checkpoint** out);
awf_status awf_checkpoint_save(const awf_checkpoint* ck, const char* path);

/* Completed generator steps; -1 on a NULL checkpoint. */
int64_t awf_checkpoint_step(const awf_checkpoint* ck);

/* Training resize target stored in the checkpoint; 0 on NULL. */
int awf_checkpoint_image_size(const awf_checkpoint* ck);

void awf_checkpoint_free(awf_checkpoint* ck);

/* ---- training and fusion ---------------------------------------------- */

/* Trains on image pairs matched by file stem between <data_dir>/ir and
 * <data_dir>/vi. config_path NULL runs on defaults; the file is plain-text
 * "key = value" lines. Writes loss_log.csv and checkpoints under out_dir.
 * resume_path, when non-NULL, continues from that checkpoint. final_out,
 * when non-NULL, receives the final state. */
awf_status awf_train(const char* config_path, const char* data_dir,
                     const char* out_dir, const char* resume_path,
                     awf_checkpoint** final_out);

/* Runs the generator on one pair of equal-sized images. Attention
 * out-parameters may be NULL when only the fused image is wanted. */
awf_status awf_fuse(const awf_checkpoint* ck, const awf_image* ir,
                    const awf_image* vi, awf_image** fused,
                    awf_image** att_ir, awf_image** att_vi);

/* ---- evaluation ------------------------------------------------------- */

typedef struct awf_metrics {
  double mi;   /* mutual information carried from both sources */
  double en;   /* entropy of the fused image, bits */
  double sd;   /* standard deviation */
  double sf;   /* spatial frequency */
  double viff; /* visual information fidelity for fusion */
  double scd;  /* sum of source-to-fused correlations */
} awf_metrics;

/* Scores one fused image against its infrared and visible sources. */
awf_status awf_evaluate_pair(const awf_image* ir, const awf_image* vi,
                             const awf_image* fused, awf_metrics* out);

/* Scores every stem present in all three directories and writes a CSV
 * (header pair,mi,en,sd,sf,viff,scd; rows sorted by stem) plus a summary
 * JSON next to it with the .json extension. */
awf_status awf_eval_directories(const char* ir_dir, const char* vi_dir,
                                const char* fused_dir, const char* csv_path);

/* ---- wavelet ---------------------------------------------------------- */

/* One level of the orthonormal 2D Haar transform. Each subband buffer holds
 * ceil(height/2) * ceil(width/2) values, row major; odd inputs are edge
 * replicated. Subband values exceed [0,1]: LL reaches 2, details are
 * signed. */
awf_status awf_haar_dwt2(const double* pixels, int height, int width,
                         double* ll, double* hl, double* lh, double* hh);

/* Inverse transform cropped back to height x width. */
awf_status awf_haar_idwt2(const double* ll, const double* hl,
                          const double* lh, const double* hh, int height,
                          int width, double* pixels_out);

/* ---- target mask ------------------------------------------------------ */

/* Binary map keeping the keep_regions largest 8-connected components of the
 * pixels at or above half the map maximum. */
awf_status awf_extract_mask(const awf_image* attention, int keep_regions,
                            awf_image** out);

/* Same computation keeping the intermediate stages: the candidate map at
 * half maximum, the components rendered as distinct grays, and the final
 * mask. Out-parameters may individually be NULL. */
awf_status awf_mask_stages(const awf_image* attention, int keep_regions,
                           awf_image** threshold_map, awf_image** components,
                           awf_image** mask);

#ifdef __cplusplus
}
#endif

#endif /* AWFGAN_H */
