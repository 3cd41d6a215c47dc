use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};

use super::MediaError;

/// Frame rate of the source material when nothing else is known.
pub const DEFAULT_FRAME_RATE: f64 = 29.97;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaneKind {
    Y,
    U,
    V,
}

impl PlaneKind {
    pub const ALL: [PlaneKind; 3] = [PlaneKind::Y, PlaneKind::U, PlaneKind::V];
}

/// Borrowed view of one 8-bit plane.
#[derive(Debug, Clone, Copy)]
pub struct PlaneRef<'a> {
    pub width: usize,
    pub height: usize,
    pub data: &'a [u8],
}

/// One 8-bit 4:2:0 frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoFrame {
    width: usize,
    height: usize,
    y: Vec<u8>,
    u: Vec<u8>,
    v: Vec<u8>,
}

fn check_dims(width: usize, height: usize) -> Result<(), MediaError> {
    if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
        Err(MediaError::Dimensions { width, height })
    } else {
        Ok(())
    }
}

impl VideoFrame {
    pub fn new(width: usize, height: usize, y: Vec<u8>, u: Vec<u8>, v: Vec<u8>) -> Result<Self, MediaError> {
        check_dims(width, height)?;
        let luma = width * height;
        let chroma = luma / 4;
        for (plane, len, expected) in [
            (PlaneKind::Y, y.len(), luma),
            (PlaneKind::U, u.len(), chroma),
            (PlaneKind::V, v.len(), chroma),
        ] {
            if len != expected {
                return Err(MediaError::PlaneLength {
                    plane,
                    expected,
                    actual: len,
                });
            }
        }
        Ok(Self { width, height, y, u, v })
    }

    /// A frame with every sample of each plane set to the given value.
    pub fn filled(width: usize, height: usize, y: u8, u: u8, v: u8) -> Result<Self, MediaError> {
        let luma = width * height;
        Self::new(width, height, vec![y; luma], vec![u; luma / 4], vec![v; luma / 4])
    }

    /// Bytes occupied by one I420 frame of the given size.
    pub fn byte_size(width: usize, height: usize) -> usize {
        width * height * 3 / 2
    }

    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self, MediaError> {
        check_dims(width, height)?;
        let luma = width * height;
        let chroma = luma / 4;
        if bytes.len() != luma + 2 * chroma {
            return Err(MediaError::PlaneLength {
                plane: PlaneKind::Y,
                expected: luma + 2 * chroma,
                actual: bytes.len(),
            });
        }
        Self::new(
            width,
            height,
            bytes[..luma].to_vec(),
            bytes[luma..luma + chroma].to_vec(),
            bytes[luma + chroma..].to_vec(),
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::byte_size(self.width, self.height));
        out.extend_from_slice(&self.y);
        out.extend_from_slice(&self.u);
        out.extend_from_slice(&self.v);
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u32 {
        8
    }

    pub fn plane(&self, kind: PlaneKind) -> PlaneRef<'_> {
        match kind {
            PlaneKind::Y => PlaneRef {
                width: self.width,
                height: self.height,
                data: &self.y,
            },
            PlaneKind::U => PlaneRef {
                width: self.width / 2,
                height: self.height / 2,
                data: &self.u,
            },
            PlaneKind::V => PlaneRef {
                width: self.width / 2,
                height: self.height / 2,
                data: &self.v,
            },
        }
    }

    pub fn y_plane(&self) -> &[u8] {
        &self.y
    }

    pub fn u_plane(&self) -> &[u8] {
        &self.u
    }

    pub fn v_plane(&self) -> &[u8] {
        &self.v
    }

    pub fn plane_mut(&mut self, kind: PlaneKind) -> &mut [u8] {
        match kind {
            PlaneKind::Y => &mut self.y,
            PlaneKind::U => &mut self.u,
            PlaneKind::V => &mut self.v,
        }
    }
}

type FrameIter<'a> = Box<dyn Iterator<Item = Result<VideoFrame, MediaError>> + Send + 'a>;

/// Anything that can hand out a sequence of equally sized frames in order.
pub trait FrameSource: Send + Sync {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn frame_count(&self) -> usize;
    fn frames(&self) -> Result<FrameIter<'_>, MediaError>;
}

/// In-memory frame sequence.
#[derive(Debug, Clone)]
pub struct VideoSequence {
    frames: Vec<VideoFrame>,
    frame_rate: f64,
}

impl VideoSequence {
    pub fn new(frames: Vec<VideoFrame>) -> Result<Self, MediaError> {
        Self::with_frame_rate(frames, DEFAULT_FRAME_RATE)
    }

    pub fn with_frame_rate(frames: Vec<VideoFrame>, frame_rate: f64) -> Result<Self, MediaError> {
        let first = frames.first().ok_or(MediaError::EmptySequence)?;
        if frames
            .iter()
            .any(|f| f.width() != first.width() || f.height() != first.height())
        {
            return Err(MediaError::MixedDimensions);
        }
        Ok(Self { frames, frame_rate })
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn as_slice(&self) -> &[VideoFrame] {
        &self.frames
    }
}

impl FrameSource for VideoSequence {
    fn width(&self) -> usize {
        self.frames[0].width()
    }

    fn height(&self) -> usize {
        self.frames[0].height()
    }

    fn frame_count(&self) -> usize {
        self.frames.len()
    }

    fn frames(&self) -> Result<FrameIter<'_>, MediaError> {
        Ok(Box::new(self.frames.iter().cloned().map(Ok)))
    }
}

/// A raw I420 file opened for streaming.
#[derive(Debug, Clone)]
pub struct YuvFile {
    path: PathBuf,
    width: usize,
    height: usize,
    frame_count: usize,
    frame_rate: f64,
}

/// Opens a headerless planar I420 file, validating its size against the frame geometry.
pub fn read_yuv_sequence(path: impl AsRef<Path>, width: usize, height: usize) -> Result<YuvFile, MediaError> {
    let path = path.as_ref();
    check_dims(width, height)?;
    let file_size = std::fs::metadata(path).map_err(|e| MediaError::io(path, e))?.len();
    let frame_size = VideoFrame::byte_size(width, height);
    if file_size % frame_size as u64 != 0 {
        return Err(MediaError::SizeMismatch {
            path: path.to_path_buf(),
            file_size,
            frame_size,
        });
    }
    let frame_count = (file_size / frame_size as u64) as usize;
    if frame_count == 0 {
        return Err(MediaError::EmptySequence);
    }
    Ok(YuvFile {
        path: path.to_path_buf(),
        width,
        height,
        frame_count,
        frame_rate: DEFAULT_FRAME_RATE,
    })
}

impl YuvFile {
    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn with_frame_rate(mut self, frame_rate: f64) -> Self {
        self.frame_rate = frame_rate;
        self
    }

    /// Streams frames in file order.
    pub fn stream(&self) -> Result<YuvFrames, MediaError> {
        let file = File::open(&self.path).map_err(|e| MediaError::io(&self.path, e))?;
        Ok(YuvFrames {
            reader: BufReader::new(file),
            path: self.path.clone(),
            width: self.width,
            height: self.height,
            remaining: self.frame_count,
        })
    }
}

impl FrameSource for YuvFile {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn frame_count(&self) -> usize {
        self.frame_count
    }

    fn frames(&self) -> Result<FrameIter<'_>, MediaError> {
        Ok(Box::new(self.stream()?))
    }
}

/// Lazy frame iterator over an I420 file.
#[derive(Debug)]
pub struct YuvFrames {
    reader: BufReader<File>,
    path: PathBuf,
    width: usize,
    height: usize,
    remaining: usize,
}

impl Iterator for YuvFrames {
    type Item = Result<VideoFrame, MediaError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let mut buf = vec![0u8; VideoFrame::byte_size(self.width, self.height)];
        match self.reader.read_exact(&mut buf) {
            Ok(()) => Some(VideoFrame::from_bytes(self.width, self.height, &buf)),
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => {
                self.remaining = 0;
                Some(Err(MediaError::io(&self.path, e)))
            }
            Err(e) => Some(Err(MediaError::io(&self.path, e))),
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

/// Writes frames as headerless I420.
pub fn write_yuv<'a>(path: impl AsRef<Path>, frames: impl IntoIterator<Item = &'a VideoFrame>) -> Result<(), MediaError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| MediaError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for frame in frames {
        w.write_all(&frame.to_bytes()).map_err(|e| MediaError::io(path, e))?;
    }
    w.flush().map_err(|e| MediaError::io(path, e))
}
